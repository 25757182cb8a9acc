#ifndef RWRE_KAPPA_HPP
#define RWRE_KAPPA_HPP

#include <cstdint>
#include <string>

#include "rwre/law.hpp"

namespace rwre {

// Exact one-dimensional diffusion coefficient
//   D = E_0[|X_{sigma_1} - v sigma_1|^2] / E_0(sigma_1).
// Before sigma_1 the walk sits at the origin, so the block is a geometric
// sojourn plus one holding-free jump and everything reduces to single-site
// mixture sums.
double diffusion_exact_1d(const EnvironmentLaw& law);

struct KappaTruncation {
    double tol = 1e-11;             // certified tail target for each series
    std::int64_t max_index = 4000;
};

struct OneDimCoefficients {
    double kappa_m_sq = 0.0;
    double kappa_q_sq = 0.0;
    double diffusion = 0.0;          // exact D for cross checks
    std::string method;              // "formula" | "mc" | "alt"
    double kappa_m_tail = 0.0;       // certified truncation bounds
    double kappa_q_tail = 0.0;
    std::int64_t series_index = 0;   // where the series were cut
};

// The variance coefficients of the quenched mean process (kappa_m^2) and of
// the walk around its quenched mean (kappa_q^2), evaluated exactly over the
// finite atom mixture:
//   kappa_m^2 = v^{-1} E[g^2/(1-pi_00)^2] *
//               sum_i E[ | P_0(V_i) - sum_k P_k(V_i) Einf pi_0k |^2 ]
//   kappa_q^2 = Einf E_0^w | X_1 - v - chi(X_1, w) |^2
// The site expectations propagate through an exact second-moment transfer
// recursion over the i.i.d. sites; the series are truncated only when an
// annealed pair-meeting certificate puts the remainder below tol.
OneDimCoefficients kappa_coeffs_formula(const EnvironmentLaw& law,
                                        const KappaTruncation& trunc = {});

} // namespace rwre

#endif

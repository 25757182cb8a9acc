#ifndef RWRE_EXACTQ_HPP
#define RWRE_EXACTQ_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/pairchain.hpp"

namespace rwre {

// Exact (pruned) quenched law of X_n. Pruned mass is never renormalized away;
// it accumulates in the leak ledger so every downstream bound can account
// for it.
struct SiteMassFunction {
    std::map<Lattice, double, LatticeLess> mass;
    double leak = 0.0;

    double total() const {
        double t = 0.0;
        for (const auto& [x, p] : mass) t += p;
        return t;
    }
};

struct ForwardOptions {
    double prune_threshold = 1e-15;    // per-site mass dropped into the leak
    std::int64_t support_cap = 2'000'000;
};

// Chapman-Kolmogorov iteration of P_{x0}^omega for n steps.
SiteMassFunction forward_law(const Environment& env, const Lattice& x0, std::int64_t n,
                             const ForwardOptions& opts = {});

struct QuenchedMean {
    Vec mean;
    double leak = 0.0;   // |error| <= leak * max|x| over the reachable set
};

QuenchedMean quenched_mean(const Environment& env, const Lattice& x0, std::int64_t n,
                           const ForwardOptions& opts = {});

// Dense exact propagation for monotone 1d walks started at 0: first and
// second moments of X_n at each requested step, one pass per environment.
struct Moments1d {
    std::int64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
};
std::vector<Moments1d> quenched_moments_1d(const Environment& env,
                                           std::span<const std::int64_t> steps);

// P_x^omega(V_i), V_i = {exists n >= 0 : X_n = i}, for a monotone 1d walk.
// Backward recursion on the holding-free chain.
double hitting_prob_1d(const Environment& env, std::int64_t x, std::int64_t i);

// The corrector Delta(T_base omega) = sum_i a_i g(T_{base+i} omega) with an
// exact truncation certificate.
struct CorrectorTable {
    std::vector<double> a;           // a_0 .. a_I
    double delta_value = 0.0;
    std::int64_t truncation_index = 0;
    double tail_bound = 0.0;         // certified |Delta - truncated sum|
};

struct CorrectorOptions {
    double tol = 1e-12;
    std::int64_t max_index = 4096;
    double moment_p = 2.0;           // p used in the (M/delta)^{p/(p-1)} envelope
};

// v may be supplied (exact closed form); defaults to exact_velocity_1d(law).
CorrectorTable corrector(const Environment& env, std::int64_t base,
                         const CorrectorOptions& opts = {});
CorrectorTable corrector(const Environment& env, std::int64_t base, double v,
                         const CorrectorOptions& opts = {});

// chi(x, omega) = sum_{y=0}^{x-1} Delta(T_y omega), x >= 0.
struct ChiValue {
    double value = 0.0;
    double bound = 0.0;   // accumulated truncation certificates
};
ChiValue chi(const Environment& env, std::int64_t x, double v,
             const CorrectorOptions& opts = {});

// E_0^omega[chi(X_1, omega)] - g(omega); zero in exact arithmetic, so the
// returned residual must sit inside the certified bound.
struct MartingaleResidual {
    double residual = 0.0;
    double bound = 0.0;
};
MartingaleResidual martingale_residual(const Environment& env,
                                       const CorrectorOptions& opts = {});

// a_0 .. a_count at the given base, with no truncation logic.
std::vector<double> corrector_coefficients(const Environment& env, std::int64_t base,
                                           std::int64_t count);

// sum_{j=0}^{i} a_j(T_{i-j} omega) sum_{y > i-j} pi_{0y}(omega), i >= 1.
// Vanishes identically; checked numerically as an empirical identity.
double corrector_convolution_identity(const Environment& env, std::int64_t i, double v = 0.0,
                                      const CorrectorOptions& opts = {});

// Exact two-sided check of E_x^omega(e^{-lambda X_n . u}) <=
// e^{-lambda x . u} (1 - lambda delta / 2)^n.
struct ExpBoundResult {
    double lhs = 0.0;
    double rhs = 0.0;
};
ExpBoundResult exp_bound_check(const Environment& env, const Lattice& x, std::int64_t n,
                               double lambda, double moment_p = 2.0);

} // namespace rwre

#endif

#ifndef RWRE_ESTIMATORS_HPP
#define RWRE_ESTIMATORS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rwre/kappa.hpp"
#include "rwre/walk.hpp"

namespace rwre {

struct VelocityEstimate {
    Vec v_hat;
    Vec std_err;
    std::int64_t n_blocks = 0;
};

// v = E_0(X_{sigma_1}) / E_0(sigma_1) from i.i.d. regeneration blocks, with a
// delta-method CI for the ratio of means.
VelocityEstimate velocity(const std::vector<RegenerationBlock>& blocks);

struct DiffusionReport {
    Vec v;                      // centering used
    Mat d_hat;                  // estimated diffusion matrix
    Mat std_err;                // jackknife standard errors, entrywise
    std::int64_t n_blocks = 0;
    double min_eigenvalue = 0.0;
    bool v_exact = false;
};

// D = E_0[(X_{sigma_1} - v sigma_1)(X_{sigma_1} - v sigma_1)^t] / E_0(sigma_1),
// sample version over blocks with leave-one-out standard errors. The report
// is validated: symmetric to 1e-12, eigenvalues >= -1e-9 * trace.
DiffusionReport annealed_diffusion(const std::vector<RegenerationBlock>& blocks, const Vec& v,
                                   bool v_exact = false);

struct DegeneracyReport {
    std::vector<Lattice> span_basis;         // span{x - y : both one-jump reachable}
    std::vector<Lattice> complement_basis;   // integer basis of the orthogonal complement
    int rank = 0;
};

// Exact integer linear algebra over the difference set of the one-jump
// support; the diffusion matrix is degenerate exactly on the complement.
DegeneracyReport degeneracy_subspace(const EnvironmentLaw& law);

struct QuadraticFormCheck {
    Lattice direction;
    double value = 0.0;       // u^t D u
    double threshold = 0.0;   // 4 * propagated standard error
};

std::vector<QuadraticFormCheck> verify_degeneracy(const DiffusionReport& report,
                                                  const DegeneracyReport& subspace);

// kappa_m^2 = (v / E_{0,0}(L)) E[ |E_0^w(X_{sigma_1} - v sigma_1)|^2 ]:
// the L factor by Monte Carlo over common points of two walks in a shared
// environment, the omega-expectation exactly over the atom mixture.
struct KappaMAlt {
    double value = 0.0;
    double std_err = 0.0;
    double mean_L = 0.0;
    double mean_L_std_err = 0.0;
};
KappaMAlt kappa_m_alt(const EnvironmentLaw& law, std::int64_t mc_pairs,
                      std::uint64_t master_seed, std::int64_t horizon = 4096,
                      int n_threads = 0);

// | kappa_m^2 + kappa_q^2 - D |, the additive decomposition of the annealed
// diffusion coefficient.
double decomposition_residual(const OneDimCoefficients& coeffs);

struct ProbabilityEstimate {
    double value = 0.0;
    double std_err = 0.0;
    std::int64_t replicates = 0;
    std::int64_t hits = 0;
};

// P_inf(A) = E_0( sum_{m=sigma_k}^{sigma_{k+1}-1} 1{T_{X_m} omega in A} ) / E_0(sigma_1)
// with k the event's measurability level; ratio estimator over annealed replicates.
ProbabilityEstimate pinfty_via_regeneration(const EnvironmentLaw& law, const WindowEvent& ev,
                                            std::int64_t replicates, std::uint64_t master_seed,
                                            int n_threads = 0);

// P_n(A) = P_0(T_{X_n} omega in A), the finite-n approximation.
ProbabilityEstimate pinfty_via_limit(const EnvironmentLaw& law, const WindowEvent& ev,
                                     std::int64_t n, std::int64_t replicates,
                                     std::uint64_t master_seed, int n_threads = 0);

// Exact P_inf(A) for single-site events at the origin via the density
// (1 - pi_00)^{-1} / E[(1 - pi_00)^{-1}] (d = 1).
double pinfty_exact_site_event(const EnvironmentLaw& law, std::int64_t atom_id);

struct FluctuationSample {
    std::vector<double> values;      // (E_0^w(X_n) - n v) / sqrt(n) per environment
    std::vector<double> quenched_var_rate;   // (Var^w(X_n) - Var^w(X_{n/2})) / (n - n/2)
    double variance = 0.0;           // sample variance of values
    double variance_std_err = 0.0;   // fourth-moment standard error
    double mean_var_rate = 0.0;      // kappa_q^2 estimate
    double mean_var_rate_std_err = 0.0;
    std::int64_t n = 0;
};

// Exact quenched means over independent environments; the cross-environment
// variance of the scaled centered mean estimates kappa_m^2, and the
// differenced quenched variance rate estimates kappa_q^2.
FluctuationSample quenched_mean_fluctuation(const EnvironmentLaw& law, std::int64_t n,
                                            std::int64_t n_envs, std::uint64_t master_seed,
                                            int n_threads = 0);

struct RestrictedCoefficients {
    Vec v;
    Mat d_m;             // quenched-mean process diffusion matrix
    double kappa0_sq = 0.0;
    Mat d_total;         // annealed diffusion matrix
    double identity_residual = 0.0;   // max |D - D_m - kappa0^2 v v^t|
};

// Closed forms for restricted-path laws (each site holds or makes its one
// jump): lambda_1 sojourns are geometric, so everything is a finite mixture sum.
RestrictedCoefficients restricted_path_coefficients(const EnvironmentLaw& law);

// p_0 = 19/6 + (sqrt(139)/3) cos( arccos(1504 / 139^{3/2}) / 3 ).
double p0_constant();

struct DriftBoundSeries {
    std::vector<std::int64_t> n_grid;
    std::vector<double> deviation;      // |E_0(X_n) - n v|
    std::vector<double> std_err;
    double slope = 0.0;                 // least squares, deviation vs n
    double slope_std_err = 0.0;
};

// |E_0(X_n) - n v| over a grid: annealed mean by MC over environments with
// the quenched mean exact in each. Bounded, trendless series expected.
DriftBoundSeries quenched_mean_drift_bound(const EnvironmentLaw& law,
                                           const std::vector<std::int64_t>& n_grid,
                                           std::int64_t n_envs, std::uint64_t master_seed,
                                           int n_threads = 0);

} // namespace rwre

#endif

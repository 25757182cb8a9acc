#ifndef RWRE_RENEWAL_HPP
#define RWRE_RENEWAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre {

// Law of the i.i.d. positive integer jumps Y_i of a renewal process.
class RenewalLaw {
public:
    // pairs (value, probability); values >= 1, probabilities sum to 1.
    explicit RenewalLaw(std::vector<std::pair<std::int64_t, double>> pmf);

    static RenewalLaw uniform(std::int64_t lo, std::int64_t hi);
    static RenewalLaw constant(std::int64_t y);

    std::int64_t period_h() const { return h_; }         // gcd of the support
    std::int64_t max_support() const { return rho_; }
    double pmf(std::int64_t k) const;
    double mean() const;
    double moment(double p) const;                       // E(Y^p)
    std::int64_t sample(Rng& rng) const;

    // The law of Y / h; identity when h = 1.
    RenewalLaw divided_by_period() const;

private:
    std::vector<double> pmf_;      // pmf_[k] = P(Y = k), k = 0..rho
    std::vector<double> cumulative_;
    std::int64_t rho_ = 0;
    std::int64_t h_ = 1;
};

// L_{i,j} = inf{ l >= 1 : l in (i + S) and (j + S~) }, sampled by a
// two-pointer race of the delayed renewal processes.
struct SampleLResult {
    std::int64_t value = 0;
    bool horizon_exhausted = false;
};
SampleLResult sample_L(const RenewalLaw& law, std::int64_t i, std::int64_t j, Rng& rng,
                       std::int64_t horizon = 1'000'000);

// Overshoot of the pure renewal process over level x (one step of the
// zeta-chain from state x).
std::int64_t forward_recurrence(const RenewalLaw& law, std::int64_t x, Rng& rng);

// Exact law of B^0_x: probabilities of overshoot m = 0..rho-1, via the
// renewal-function DP. Requires h = 1.
std::vector<double> overshoot_distribution(const RenewalLaw& law, std::int64_t x);

struct MomentResult {
    double value = 0.0;
    double std_err = 0.0;       // 0 for exact methods
    std::string method;         // "exact-linear-system" | "mc"
};

// E(L_{i,j}^p). p = 1 is exact through the absorbing zeta-chain linear
// system; p > 1 falls back to Monte Carlo with a CI.
MomentResult exact_moment_L(const RenewalLaw& law, std::int64_t i, std::int64_t j, double p,
                            std::int64_t mc_samples = 200'000,
                            std::uint64_t seed = 0x52454e45ULL);

// Exact distribution of L_{0,j} (j >= 1, h = 1) by propagating the
// zeta-chain jointly with the accumulated sum; an MC-free oracle.
struct LDistribution {
    std::vector<double> pmf;      // pmf[s] = P(L_{0,j} = s)
    double tail_mass = 0.0;       // certified bound on P(L > horizon)
    double mean_lower = 0.0;      // mean of the truncated distribution
    double mean_upper = 0.0;      // mean_lower + certified tail contribution
};
LDistribution distribution_L0j(const RenewalLaw& law, std::int64_t j, double tail_eps = 1e-12,
                               std::int64_t max_horizon = 1 << 22);

struct MomentBoundReport {
    std::vector<std::int64_t> j_grid;
    std::vector<double> moments;      // E(L_{0,j}^p)
    std::vector<double> std_errs;
    std::vector<double> ratios;       // E(L_{0,j}^p) / (1 + j^p)
    double C_hat = 0.0;               // max ratio
    double slope = 0.0;               // log ratio vs log j, full grid
    double slope_std_err = 0.0;
    double tail_slope = 0.0;          // same fit on the top half of the grid
    double tail_slope_std_err = 0.0;
    double approach_allowance = 0.0;  // O(1/j) slack for a bounded ratio's asymptote
    bool growth_detected = false;
    std::string method;
};

// Ratios E(L_{0,j}^p)/(1+j^p) over the grid. The moment bound makes the ratio
// bounded, not monotone: exact values approach their ceiling like C(1 + c/j),
// which shows up as a vanishing tail slope of either sign. Growth is flagged
// only when the top-half slope exceeds its confidence band plus the O(1/j)
// approach allowance, which is what a genuine power-law violation would do.
MomentBoundReport verify_moment_bound(const RenewalLaw& law, double p,
                                      const std::vector<std::int64_t>& j_grid,
                                      std::int64_t mc_samples = 20'000,
                                      std::uint64_t seed = 0x52454e32ULL);

// Exact ratios E_x(zeta_1^p) / E(Y^{p+1}) over a grid of states.
std::vector<double> zeta_moment_check(const RenewalLaw& law, double p,
                                      const std::vector<std::int64_t>& x_grid);

struct TailReport {
    std::vector<std::int64_t> n_grid;
    std::vector<double> survival;     // P_x(nu_0 > n) estimates
    std::vector<double> std_errs;
    double log_slope = 0.0;           // least-squares slope of log survival vs n
    double log_slope_std_err = 0.0;
};

// MC tail of the zeta-chain absorption time nu_0 from state x.
TailReport nu0_tail(const RenewalLaw& law, std::int64_t x,
                    const std::vector<std::int64_t>& n_grid,
                    std::int64_t replicates = 200'000, std::uint64_t seed = 0x52454e33ULL);

// Exact P_x(nu_0 > n) by powering the transient part of the zeta-chain.
double nu0_survival_exact(const RenewalLaw& law, std::int64_t x, std::int64_t n);

} // namespace rwre

#endif

#ifndef RWRE_STATS_HPP
#define RWRE_STATS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwre/estimators.hpp"

namespace rwre {

struct SampleSummary {
    std::int64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double ks_statistic = 0.0;       // vs Normal(0, target or sample variance)
    bool pass = false;
    std::string detail;
};

SampleSummary summarize(std::span<const double> samples);

// Finite-dimensional normality gate: skewness and excess kurtosis within
// 4 standard errors of 0, KS below the asymptotic 1% critical value.
SampleSummary normality_check(std::span<const double> samples,
                              std::optional<double> target_variance = std::nullopt);

// MC walks in one fixed environment; samples (X_n - E_0^w(X_n))/sqrt(n) with
// the quenched mean exact.
SampleSummary quenched_clt_check(const Environment& env, std::int64_t n,
                                 std::int64_t replicates, std::uint64_t master_seed,
                                 std::optional<double> target_variance = std::nullopt,
                                 int n_threads = 0);

struct TightnessDiagnostic {
    std::vector<std::int64_t> n_grid;
    std::vector<double> c_n;          // (E_0^w(X_n) - n v)/sqrt(n), exact
    double range_top_half = 0.0;      // dispersion over the top half of the grid
    double floor = 1e-9;              // numerical-exactness floor
    bool stabilizes = false;          // true only in the degenerate D = v regime
};

// Exact c_n series under one fixed environment. Under P(D = v) < 1 the series
// must keep wandering; the range criterion operationalizes non-tightness.
TightnessDiagnostic tightness_diagnostic(const EnvironmentLaw& law, std::uint64_t env_seed,
                                         const std::vector<std::int64_t>& n_grid);

struct IndependenceReport {
    std::vector<double> duration_autocorr;       // lags 1..max_lag
    std::vector<double> displacement_autocorr;   // first coordinate, lags 1..max_lag
    double autocorr_threshold = 0.0;             // 4 / sqrt(m)
    double chi_square = 0.0;                     // lag-1 contingency on duration bins
    double chi_square_critical = 0.0;            // 1% critical value
    bool pass = false;
};

IndependenceReport block_independence_test(const std::vector<RegenerationBlock>& blocks,
                                           int max_lag = 5);

struct TailCheckReport {
    std::vector<double> h_grid;
    std::vector<double> tail_prob;     // P(|X_n - n v| > h)
    std::vector<double> std_err;
    double slope = 0.0;                // log tail vs log h over the far tail
    double slope_std_err = 0.0;
    double p_bar = 0.0;
};

// Empirical annealed deviation tail against the h^{-p_bar} n^{p_bar/2} envelope.
TailCheckReport annealed_tail_check(const EnvironmentLaw& law, std::int64_t n,
                                    const std::vector<double>& h_grid, double p_bar,
                                    std::int64_t replicates, std::uint64_t master_seed,
                                    int n_threads = 0);

struct DivergenceProbe {
    std::vector<std::int64_t> caps;
    std::vector<double> truncated_means;    // E(sigma_1 ^ cap)
    std::vector<double> step_std_errs;      // paired std errs of successive differences
    std::vector<double> steps;              // successive differences
    bool strictly_increasing = false;       // every step exceeds 4 paired std errs
};

// Truncated means E(sigma_1 ^ cap) over growing caps from one common sample
// set; diverging E(sigma_1) shows up as steps that never stall.
DivergenceProbe sigma1_divergence_probe(const EnvironmentLaw& law,
                                        const std::vector<std::int64_t>& caps,
                                        std::int64_t replicates, std::uint64_t master_seed,
                                        int n_threads = 0);

} // namespace rwre

#endif

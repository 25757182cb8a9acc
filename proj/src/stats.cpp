#include "rwre/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "rwre/exactq.hpp"
#include "rwre/parallel.hpp"

namespace rwre {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Asymptotic two-sided KS critical value at the 1% level.
constexpr double kKs01 = 1.6276;

} // namespace

SampleSummary summarize(std::span<const double> samples) {
    SampleSummary s;
    s.n = static_cast<std::int64_t>(samples.size());
    const double n = static_cast<double>(samples.size());
    for (const double x : samples) s.mean += x;
    s.mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const double x : samples) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.variance = m2 * n / std::max(1.0, n - 1.0);
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

SampleSummary normality_check(std::span<const double> samples,
                              std::optional<double> target_variance) {
    if (samples.size() < 1000)
        throw std::invalid_argument("normality_check: at least 10^3 samples required");
    SampleSummary s = summarize(samples);
    const double n = static_cast<double>(s.n);

    if (target_variance.has_value() && *target_variance <= 0.0) {
        // degenerate target: pass only if the sample is identically zero
        double maxabs = 0.0;
        for (const double x : samples) maxabs = std::max(maxabs, std::abs(x));
        s.pass = maxabs == 0.0;
        s.detail = "degenerate target variance";
        return s;
    }
    const double var = target_variance.value_or(s.variance);
    if (s.variance == 0.0 || var <= 0.0) {
        s.pass = false;
        s.detail = "constant sample";
        return s;
    }

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = std::sqrt(var);
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = std_normal_cdf(sorted[i] / sd);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max(ks, std::max(std::abs(f - lo), std::abs(hi - f)));
    }
    s.ks_statistic = ks;

    const double se_skew = std::sqrt(6.0 / n);
    const double se_kurt = std::sqrt(24.0 / n);
    const bool moments_ok =
        std::abs(s.skewness) <= 4.0 * se_skew && std::abs(s.excess_kurtosis) <= 4.0 * se_kurt;
    const bool ks_ok = ks <= kKs01 / std::sqrt(n);
    s.pass = moments_ok && ks_ok;
    if (!moments_ok) s.detail += "moments out of band; ";
    if (!ks_ok) s.detail += "KS above 1% critical value; ";
    return s;
}

SampleSummary quenched_clt_check(const Environment& env, std::int64_t n,
                                 std::int64_t replicates, std::uint64_t master_seed,
                                 std::optional<double> target_variance, int n_threads) {
    if (env.dim() != 1) throw std::invalid_argument("quenched_clt_check: d = 1 required");
    const std::array<std::int64_t, 1> steps{n};
    const auto moments = quenched_moments_1d(env, steps);
    const double quenched_mean_n = moments[0].mean;

    std::vector<double> samples(static_cast<std::size_t>(replicates));
    parallel_for(replicates, [&](std::int64_t r) {
        Rng rng(hash_combine(master_seed, 0x71636c74ULL), static_cast<std::uint64_t>(r));
        Lattice x = Lattice::Zero(1);
        for (std::int64_t s = 0; s < n; ++s) {
            const auto& jd = env.site_env(x);
            x += jd.sample(rng.next_unit());
        }
        samples[static_cast<std::size_t>(r)] =
            (static_cast<double>(x[0]) - quenched_mean_n) / std::sqrt(static_cast<double>(n));
    }, n_threads);
    return normality_check(samples, target_variance);
}

TightnessDiagnostic tightness_diagnostic(const EnvironmentLaw& law, std::uint64_t env_seed,
                                         const std::vector<std::int64_t>& n_grid) {
    if (law.dim() != 1) throw std::invalid_argument("tightness_diagnostic: d = 1 required");
    const double v = exact_velocity_1d(law);
    Environment env(law, env_seed);

    TightnessDiagnostic diag;
    diag.n_grid = n_grid;
    std::vector<std::int64_t> steps(n_grid);
    std::sort(steps.begin(), steps.end());
    const auto moments = quenched_moments_1d(env, steps);
    for (std::size_t i = 0; i < moments.size(); ++i) {
        const double n = static_cast<double>(moments[i].n);
        diag.c_n.push_back((moments[i].mean - n * v) / std::sqrt(std::max(1.0, n)));
    }
    const std::size_t half = diag.c_n.size() / 2;
    double lo = diag.c_n[half], hi = diag.c_n[half];
    for (std::size_t i = half; i < diag.c_n.size(); ++i) {
        lo = std::min(lo, diag.c_n[i]);
        hi = std::max(hi, diag.c_n[i]);
    }
    diag.range_top_half = hi - lo;
    diag.stabilizes = diag.range_top_half <= 4.0 * diag.floor;
    return diag;
}

namespace {

std::vector<double> autocorrelations(const std::vector<double>& x, int max_lag) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (const double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (const double v : x) var += (v - mean) * (v - mean);
    std::vector<double> acf;
    for (int lag = 1; lag <= max_lag; ++lag) {
        double c = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < x.size(); ++i)
            c += (x[i] - mean) * (x[i + static_cast<std::size_t>(lag)] - mean);
        acf.push_back(var > 0.0 ? c / var : 0.0);
    }
    return acf;
}

// Wilson-Hilferty approximation of the 99% chi-square quantile.
double chi_square_quantile_99(double df) {
    const double z = 2.3263478740408408;
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

} // namespace

IndependenceReport block_independence_test(const std::vector<RegenerationBlock>& blocks,
                                           int max_lag) {
    if (blocks.size() < 1000)
        throw std::invalid_argument("block_independence_test: at least 10^3 blocks required");
    IndependenceReport report;
    std::vector<double> durations, displacements;
    for (const auto& b : blocks) {
        durations.push_back(static_cast<double>(b.duration));
        displacements.push_back(static_cast<double>(b.displacement[0]));
    }
    report.duration_autocorr = autocorrelations(durations, max_lag);
    report.displacement_autocorr = autocorrelations(displacements, max_lag);
    report.autocorr_threshold = 4.0 / std::sqrt(static_cast<double>(blocks.size()));

    // lag-1 contingency chi-square on duration split at the median
    std::vector<double> sorted(durations);
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::array<std::array<double, 2>, 2> table{{{0.0, 0.0}, {0.0, 0.0}}};
    for (std::size_t i = 0; i + 1 < durations.size(); ++i) {
        const int a = durations[i] > median ? 1 : 0;
        const int b = durations[i + 1] > median ? 1 : 0;
        table[a][b] += 1.0;
    }
    const double total = static_cast<double>(durations.size() - 1);
    double chi = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double row = table[a][0] + table[a][1];
            const double col = table[0][b] + table[1][b];
            const double expect = row * col / total;
            if (expect > 0.0) chi += (table[a][b] - expect) * (table[a][b] - expect) / expect;
        }
    }
    report.chi_square = chi;
    report.chi_square_critical = chi_square_quantile_99(1.0);

    bool pass = chi <= report.chi_square_critical;
    for (const double r : report.duration_autocorr) pass = pass && std::abs(r) <= report.autocorr_threshold;
    for (const double r : report.displacement_autocorr) pass = pass && std::abs(r) <= report.autocorr_threshold;
    report.pass = pass;
    return report;
}

TailCheckReport annealed_tail_check(const EnvironmentLaw& law, std::int64_t n,
                                    const std::vector<double>& h_grid, double p_bar,
                                    std::int64_t replicates, std::uint64_t master_seed,
                                    int n_threads) {
    const auto shared_law = std::make_shared<const EnvironmentLaw>(law);
    Vec v;
    if (law.dim() == 1) {
        v = Vec::Constant(1, exact_velocity_1d(law));
    } else {
        // annealed one-step drift is exact for these i.i.d. laws only when
        // sigma_1 = 1; otherwise estimate from blocks
        const auto blocks = sample_blocks(law, 20000, hash_combine(master_seed, 0x76ULL));
        v = velocity(blocks.blocks).v_hat;
    }

    std::vector<double> deviation(static_cast<std::size_t>(replicates));
    parallel_for(replicates, [&](std::int64_t r) {
        const std::uint64_t env_seed = hash_combine(hash_combine(master_seed, 0x7461696cULL),
                                                    static_cast<std::uint64_t>(r));
        Environment env(shared_law, env_seed);
        Rng rng(hash_combine(master_seed, 0x7461696c77ULL), static_cast<std::uint64_t>(r));
        Lattice x = Lattice::Zero(law.dim());
        for (std::int64_t s = 0; s < n; ++s) {
            const auto& jd = env.site_env(x);
            x += jd.sample(rng.next_unit());
        }
        const Vec c = to_real(x) - static_cast<double>(n) * v;
        deviation[static_cast<std::size_t>(r)] = c.cwiseAbs().sum();
    }, n_threads);

    TailCheckReport report;
    report.h_grid = h_grid;
    report.p_bar = p_bar;
    std::vector<double> lx, ly;
    for (const double h : h_grid) {
        std::int64_t count = 0;
        for (const double d : deviation) count += (d > h) ? 1 : 0;
        const double phat = static_cast<double>(count) / static_cast<double>(replicates);
        report.tail_prob.push_back(phat);
        report.std_err.push_back(std::sqrt(phat * (1.0 - phat) / static_cast<double>(replicates)));
        if (count >= 8) {   // fit only where the tail is resolved
            lx.push_back(std::log(h));
            ly.push_back(std::log(phat));
        }
    }
    if (lx.size() >= 3) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        report.slope = sxy / sxx;
        double rss = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double f = my + report.slope * (lx[i] - mx);
            rss += (ly[i] - f) * (ly[i] - f);
        }
        if (lx.size() > 2)
            report.slope_std_err =
                std::sqrt(rss / (static_cast<double>(lx.size() - 2) * sxx));
    }
    return report;
}

DivergenceProbe sigma1_divergence_probe(const EnvironmentLaw& law,
                                        const std::vector<std::int64_t>& caps,
                                        std::int64_t replicates, std::uint64_t master_seed,
                                        int n_threads) {
    DivergenceProbe probe;
    probe.caps = caps;
    std::vector<std::int64_t> sorted_caps(caps);
    std::sort(sorted_caps.begin(), sorted_caps.end());
    const std::int64_t max_cap = sorted_caps.back();

    const auto samples = sample_sigma1_truncated(law, replicates, max_cap, master_seed, n_threads);
    const double n = static_cast<double>(replicates);
    for (const auto cap : sorted_caps) {
        double mean = 0.0;
        for (const auto s : samples) mean += static_cast<double>(std::min(s, cap));
        probe.truncated_means.push_back(mean / n);
    }
    probe.strictly_increasing = true;
    for (std::size_t i = 0; i + 1 < sorted_caps.size(); ++i) {
        // paired difference min(s, cap_{i+1}) - min(s, cap_i) per sample
        double mean = 0.0, sq = 0.0;
        for (const auto s : samples) {
            const double d = static_cast<double>(std::min(s, sorted_caps[i + 1]) -
                                                 std::min(s, sorted_caps[i]));
            mean += d;
            sq += d * d;
        }
        mean /= n;
        const double var = std::max(0.0, sq / n - mean * mean);
        const double se = std::sqrt(var / n);
        probe.steps.push_back(mean);
        probe.step_std_errs.push_back(se);
        if (!(mean > 4.0 * se)) probe.strictly_increasing = false;
    }
    return probe;
}

} // namespace rwre

#include "rwre/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rwre/exactq.hpp"
#include "rwre/intlinalg.hpp"
#include "rwre/parallel.hpp"

namespace rwre {

VelocityEstimate velocity(const std::vector<RegenerationBlock>& blocks) {
    if (blocks.size() < 2) throw std::invalid_argument("velocity: need at least 2 blocks");
    const auto n = static_cast<double>(blocks.size());
    const Eigen::Index d = blocks.front().displacement.size();

    Vec mean_x = Vec::Zero(d);
    double mean_t = 0.0;
    for (const auto& b : blocks) {
        mean_x += to_real(b.displacement);
        mean_t += static_cast<double>(b.duration);
    }
    mean_x /= n;
    mean_t /= n;

    VelocityEstimate est;
    est.n_blocks = static_cast<std::int64_t>(blocks.size());
    est.v_hat = mean_x / mean_t;
    est.std_err = Vec::Zero(d);
    // delta method: Var(v_c) ~ Var(X_c - v_c T) / (n T_bar^2)
    Vec ssq = Vec::Zero(d);
    for (const auto& b : blocks) {
        const Vec r = to_real(b.displacement) - est.v_hat * static_cast<double>(b.duration);
        ssq += r.cwiseProduct(r);
    }
    est.std_err = (ssq / (n - 1.0)).cwiseSqrt() / (std::sqrt(n) * mean_t);
    return est;
}

DiffusionReport annealed_diffusion(const std::vector<RegenerationBlock>& blocks, const Vec& v,
                                   bool v_exact) {
    if (blocks.size() < 2) throw std::invalid_argument("annealed_diffusion: need at least 2 blocks");
    const auto n = static_cast<double>(blocks.size());
    const Eigen::Index d = v.size();

    Mat sum_m = Mat::Zero(d, d);
    double sum_t = 0.0;
    std::vector<Mat> outer(blocks.size());
    for (std::size_t r = 0; r < blocks.size(); ++r) {
        const auto& b = blocks[r];
        const Vec c = to_real(b.displacement) - v * static_cast<double>(b.duration);
        outer[r] = c * c.transpose();
        sum_m += outer[r];
        sum_t += static_cast<double>(b.duration);
    }

    DiffusionReport report;
    report.v = v;
    report.v_exact = v_exact;
    report.n_blocks = static_cast<std::int64_t>(blocks.size());
    report.d_hat = sum_m / sum_t;

    // leave-one-out jackknife, O(n) from the sums
    Mat jack_mean = Mat::Zero(d, d);
    std::vector<Mat> loo(blocks.size());
    for (std::size_t r = 0; r < blocks.size(); ++r) {
        loo[r] = (sum_m - outer[r]) / (sum_t - static_cast<double>(blocks[r].duration));
        jack_mean += loo[r];
    }
    jack_mean /= n;
    Mat var = Mat::Zero(d, d);
    for (std::size_t r = 0; r < blocks.size(); ++r) {
        const Mat diff = loo[r] - jack_mean;
        var += diff.cwiseProduct(diff);
    }
    report.std_err = ((n - 1.0) / n * var).cwiseSqrt();

    // report validation
    const double asym = (report.d_hat - report.d_hat.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw std::logic_error("annealed_diffusion: asymmetric estimate");
    Eigen::SelfAdjointEigenSolver<Mat> es(report.d_hat);
    report.min_eigenvalue = es.eigenvalues().minCoeff();
    if (report.min_eigenvalue < -1e-9 * std::max(report.d_hat.trace(), 1e-300))
        throw std::logic_error("annealed_diffusion: estimate not positive semidefinite");
    return report;
}

DegeneracyReport degeneracy_subspace(const EnvironmentLaw& law) {
    // one-jump reachable points with positive mean mass, 0 included when the
    // walk can hold
    std::vector<Lattice> J;
    for (const auto& atom : law.site_law().atoms()) {
        if (atom.weight <= 0.0) continue;
        for (const auto& jump : atom.jd.atoms()) {
            if (jump.p <= 0.0) continue;
            bool seen = false;
            for (const auto& y : J) seen = seen || lattice_eq(y, jump.z);
            if (!seen) J.push_back(jump.z);
        }
    }
    std::vector<Lattice> diffs;
    for (std::size_t i = 0; i < J.size(); ++i) {
        for (std::size_t j = i + 1; j < J.size(); ++j) diffs.push_back(J[i] - J[j]);
    }
    DegeneracyReport report;
    const auto ech = int_row_echelon(diffs, law.dim());
    report.span_basis = ech.basis;
    report.rank = ech.rank;
    report.complement_basis = int_kernel(ech, law.dim());
    return report;
}

std::vector<QuadraticFormCheck> verify_degeneracy(const DiffusionReport& report,
                                                  const DegeneracyReport& subspace) {
    std::vector<QuadraticFormCheck> checks;
    for (const auto& u : subspace.complement_basis) {
        QuadraticFormCheck c;
        c.direction = u;
        const Vec ur = to_real(u);
        c.value = ur.dot(report.d_hat * ur);
        double se = 0.0;
        for (Eigen::Index i = 0; i < ur.size(); ++i) {
            for (Eigen::Index j = 0; j < ur.size(); ++j)
                se += std::abs(ur[i] * ur[j]) * report.std_err(i, j);
        }
        c.threshold = 4.0 * se;
        checks.push_back(std::move(c));
    }
    return checks;
}

KappaMAlt kappa_m_alt(const EnvironmentLaw& law, std::int64_t mc_pairs,
                      std::uint64_t master_seed, std::int64_t horizon, int n_threads) {
    if (law.dim() != 1) throw std::invalid_argument("kappa_m_alt: d = 1 required");
    const double v = exact_velocity_1d(law);

    // E[ |E_0^w(X_{sigma_1} - v sigma_1)|^2 ] = E[ g^2 / (1 - pi_00)^2 ], exact
    double eg2 = 0.0;
    for (const auto& atom : law.site_law().atoms()) {
        const double esc = 1.0 - atom.jd.holding_prob();
        const double g = atom.jd.drift()[0] - v;
        eg2 += atom.weight * (g / esc) * (g / esc);
    }

    // E_{0,0}(L) by Monte Carlo over pairs of walks in shared environments
    std::vector<double> sums(static_cast<std::size_t>(mc_pairs), 0.0);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(mc_pairs), 0);
    parallel_for(mc_pairs, [&](std::int64_t r) {
        const std::uint64_t env_seed = hash_combine(hash_combine(master_seed, 0x4c70616972ULL),
                                                    static_cast<std::uint64_t>(r));
        const auto res = two_walker_common_points(law, env_seed, 1, 2, horizon);
        for (const auto inc : res.increments) {
            sums[static_cast<std::size_t>(r)] += static_cast<double>(inc);
            counts[static_cast<std::size_t>(r)] += 1;
        }
    }, n_threads);

    double total = 0.0;
    std::int64_t m = 0;
    for (std::size_t r = 0; r < sums.size(); ++r) {
        // all increments are i.i.d. copies of L_1's law; average within and
        // across replicates
        total += sums[r];
        m += counts[r];
    }
    const double mean_L = total / static_cast<double>(m);
    // per-increment variance needs the raw samples; re-walk cheaply instead of
    // storing them all: use replicate means for a conservative CI
    double var_rep = 0.0;
    std::int64_t reps = 0;
    for (std::size_t r = 0; r < sums.size(); ++r) {
        if (counts[r] == 0) continue;
        const double repmean = sums[r] / static_cast<double>(counts[r]);
        var_rep += (repmean - mean_L) * (repmean - mean_L);
        ++reps;
    }
    var_rep /= std::max<double>(1.0, static_cast<double>(reps - 1));

    KappaMAlt out;
    out.mean_L = mean_L;
    out.mean_L_std_err = std::sqrt(var_rep / static_cast<double>(reps));
    out.value = v / mean_L * eg2;
    out.std_err = out.value * out.mean_L_std_err / mean_L;
    return out;
}

double decomposition_residual(const OneDimCoefficients& coeffs) {
    return std::abs(coeffs.kappa_m_sq + coeffs.kappa_q_sq - coeffs.diffusion);
}

namespace {
constexpr std::uint64_t kPinfEnv = 0x70696e66ULL;
constexpr std::uint64_t kPinfWalk = 0x70696e77ULL;
} // namespace

ProbabilityEstimate pinfty_via_regeneration(const EnvironmentLaw& law, const WindowEvent& ev,
                                            std::int64_t replicates, std::uint64_t master_seed,
                                            int n_threads) {
    if (!ev.measurable_at_level(law.u_hat()))
        throw std::invalid_argument("pinfty_via_regeneration: event not measurable at its level");
    const auto shared_law = std::make_shared<const EnvironmentLaw>(law);
    const int k = ev.measurability_level;

    std::vector<double> counts(static_cast<std::size_t>(replicates), 0.0);
    std::vector<double> sigma1(static_cast<std::size_t>(replicates), 0.0);
    parallel_for(replicates, [&](std::int64_t r) {
        const std::uint64_t env_seed = hash_combine(hash_combine(master_seed, kPinfEnv),
                                                    static_cast<std::uint64_t>(r));
        Environment env(shared_law, env_seed);
        Rng rng(hash_combine(master_seed, kPinfWalk), static_cast<std::uint64_t>(r));
        Lattice x = Lattice::Zero(law.dim());
        const Lattice& u = law.u_hat();
        std::int64_t regen = 0;   // regenerations seen so far
        double gained = 0.0;
        std::int64_t guard = 0;
        while (regen <= k && guard++ < 50'000'000) {
            if (regen == k) counts[static_cast<std::size_t>(r)] +=
                event_holds(env, ev, x) ? 1.0 : 0.0;
            const auto& jd = env.site_env(x);
            const Lattice& z = jd.sample(rng.next_unit());
            x += z;
            gained += static_cast<double>(dot(z, u));
            if (regen == 0) sigma1[static_cast<std::size_t>(r)] += 1.0;
            if (gained >= 1.0) {
                ++regen;
                gained = 0.0;
            }
        }
    }, n_threads);

    double sum_c = 0.0, sum_s = 0.0;
    for (std::int64_t r = 0; r < replicates; ++r) {
        sum_c += counts[static_cast<std::size_t>(r)];
        sum_s += sigma1[static_cast<std::size_t>(r)];
    }
    ProbabilityEstimate est;
    est.replicates = replicates;
    est.hits = static_cast<std::int64_t>(sum_c);
    est.value = sum_c / sum_s;
    // delta method for the ratio of means
    const double n = static_cast<double>(replicates);
    const double ms = sum_s / n;
    double var = 0.0;
    for (std::int64_t r = 0; r < replicates; ++r) {
        const double d = counts[static_cast<std::size_t>(r)] -
                         est.value * sigma1[static_cast<std::size_t>(r)];
        var += d * d;
    }
    var /= (n - 1.0);
    est.std_err = std::sqrt(var / n) / ms;
    return est;
}

ProbabilityEstimate pinfty_via_limit(const EnvironmentLaw& law, const WindowEvent& ev,
                                     std::int64_t n, std::int64_t replicates,
                                     std::uint64_t master_seed, int n_threads) {
    const auto shared_law = std::make_shared<const EnvironmentLaw>(law);
    std::vector<std::uint8_t> hits(static_cast<std::size_t>(replicates), 0);
    parallel_for(replicates, [&](std::int64_t r) {
        const std::uint64_t env_seed = hash_combine(hash_combine(master_seed, kPinfEnv),
                                                    static_cast<std::uint64_t>(r));
        Environment env(shared_law, env_seed);
        Rng rng(hash_combine(master_seed, kPinfWalk), static_cast<std::uint64_t>(r));
        Lattice x = Lattice::Zero(law.dim());
        for (std::int64_t s = 0; s < n; ++s) {
            const auto& jd = env.site_env(x);
            x += jd.sample(rng.next_unit());
        }
        hits[static_cast<std::size_t>(r)] = event_holds(env, ev, x) ? 1 : 0;
    }, n_threads);

    ProbabilityEstimate est;
    est.replicates = replicates;
    for (const auto h : hits) est.hits += h;
    est.value = static_cast<double>(est.hits) / static_cast<double>(replicates);
    est.std_err = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(replicates));
    return est;
}

double pinfty_exact_site_event(const EnvironmentLaw& law, std::int64_t atom_id) {
    const auto& atoms = law.site_law().atoms();
    if (atom_id < 0 || static_cast<std::size_t>(atom_id) >= atoms.size())
        throw std::invalid_argument("pinfty_exact_site_event: bad atom id");
    double num = 0.0, den = 0.0;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        const double inv = 1.0 / (1.0 - atoms[a].jd.holding_prob());
        den += atoms[a].weight * inv;
        if (a == static_cast<std::size_t>(atom_id)) num = atoms[a].weight * inv;
    }
    return num / den;
}

FluctuationSample quenched_mean_fluctuation(const EnvironmentLaw& law, std::int64_t n,
                                            std::int64_t n_envs, std::uint64_t master_seed,
                                            int n_threads) {
    if (law.dim() != 1) throw std::invalid_argument("quenched_mean_fluctuation: d = 1 required");
    const double v = exact_velocity_1d(law);
    const auto shared_law = std::make_shared<const EnvironmentLaw>(law);

    FluctuationSample out;
    out.n = n;
    out.values.assign(static_cast<std::size_t>(n_envs), 0.0);
    out.quenched_var_rate.assign(static_cast<std::size_t>(n_envs), 0.0);
    const std::int64_t half = n / 2;
    const std::array<std::int64_t, 2> steps{half, n};

    parallel_for(n_envs, [&](std::int64_t r) {
        const std::uint64_t env_seed = hash_combine(hash_combine(master_seed, 0x716d66ULL),
                                                    static_cast<std::uint64_t>(r));
        Environment env(shared_law, env_seed);
        const auto moments = quenched_moments_1d(env, steps);
        const double mean_n = moments[1].mean;
        out.values[static_cast<std::size_t>(r)] =
            (mean_n - static_cast<double>(n) * v) / std::sqrt(static_cast<double>(n));
        out.quenched_var_rate[static_cast<std::size_t>(r)] =
            (moments[1].variance - moments[0].variance) / static_cast<double>(n - half);
    }, n_threads);

    const double m = static_cast<double>(n_envs);
    double mean = 0.0;
    for (const double x : out.values) mean += x;
    mean /= m;
    double s2 = 0.0, s4 = 0.0;
    for (const double x : out.values) {
        const double d = (x - mean) * (x - mean);
        s2 += d;
        s4 += d * d;
    }
    out.variance = s2 / (m - 1.0);
    out.variance_std_err = std::sqrt(std::max(0.0, s4 / m - out.variance * out.variance) / m);

    double mv = 0.0;
    for (const double x : out.quenched_var_rate) mv += x;
    mv /= m;
    double vv = 0.0;
    for (const double x : out.quenched_var_rate) vv += (x - mv) * (x - mv);
    out.mean_var_rate = mv;
    out.mean_var_rate_std_err = std::sqrt(vv / (m - 1.0) / m);
    return out;
}

RestrictedCoefficients restricted_path_coefficients(const EnvironmentLaw& law) {
    const auto hyp = check_hypothesis_E(law);
    if (!hyp.restricted_path)
        throw std::invalid_argument("restricted_path_coefficients: law is not restricted-path");
    const Eigen::Index d = law.dim();

    // per atom: holding h_a and the single non-holding jump z_a
    double e_lambda = 0.0;
    Vec e_x = Vec::Zero(d);
    for (const auto& atom : law.site_law().atoms()) {
        const double hold = atom.jd.holding_prob();
        e_lambda += atom.weight / (1.0 - hold);
        for (const auto& jump : atom.jd.atoms()) {
            if (!jump.z.isZero() && jump.p > 0.0) e_x += atom.weight * to_real(jump.z);
        }
    }
    RestrictedCoefficients out;
    out.v = e_x / e_lambda;

    Mat d_total = Mat::Zero(d, d);
    Mat d_m = Mat::Zero(d, d);
    double var_lambda = 0.0;
    for (const auto& atom : law.site_law().atoms()) {
        const double hold = atom.jd.holding_prob();
        const double esc = 1.0 - hold;
        const double mu = 1.0 / esc;                     // E(lambda_1 | atom)
        const double s2 = (1.0 + hold) / (esc * esc);    // E(lambda_1^2 | atom)
        Vec z = Vec::Zero(d);
        for (const auto& jump : atom.jd.atoms()) {
            if (!jump.z.isZero() && jump.p > 0.0) z = to_real(jump.z);
        }
        const Mat zz = z * z.transpose();
        const Mat zv = z * out.v.transpose() + out.v * z.transpose();
        const Mat vv = out.v * out.v.transpose();
        d_total += atom.weight * (zz - mu * zv + s2 * vv);
        const Vec c = z - mu * out.v;
        d_m += atom.weight * (c * c.transpose());
        var_lambda += atom.weight * hold / (esc * esc);
    }
    out.d_total = d_total / e_lambda;
    out.d_m = d_m / e_lambda;
    out.kappa0_sq = var_lambda / e_lambda;

    const Mat residual = out.d_total - out.d_m - out.kappa0_sq * (out.v * out.v.transpose());
    out.identity_residual = residual.cwiseAbs().maxCoeff();
    return out;
}

double p0_constant() {
    const double root = std::sqrt(139.0);
    return 19.0 / 6.0 +
           (root / 3.0) * std::cos(std::acos(1504.0 / (139.0 * root)) / 3.0);
}

DriftBoundSeries quenched_mean_drift_bound(const EnvironmentLaw& law,
                                           const std::vector<std::int64_t>& n_grid,
                                           std::int64_t n_envs, std::uint64_t master_seed,
                                           int n_threads) {
    if (law.dim() != 1) throw std::invalid_argument("quenched_mean_drift_bound: d = 1 required");
    const double v = exact_velocity_1d(law);
    const auto shared_law = std::make_shared<const EnvironmentLaw>(law);

    std::vector<std::int64_t> steps(n_grid);
    std::sort(steps.begin(), steps.end());
    std::vector<std::vector<double>> means(static_cast<std::size_t>(n_envs));
    parallel_for(n_envs, [&](std::int64_t r) {
        const std::uint64_t env_seed = hash_combine(hash_combine(master_seed, 0x64726966ULL),
                                                    static_cast<std::uint64_t>(r));
        Environment env(shared_law, env_seed);
        const auto moments = quenched_moments_1d(env, steps);
        for (const auto& mom : moments) means[static_cast<std::size_t>(r)].push_back(mom.mean);
    }, n_threads);

    DriftBoundSeries series;
    series.n_grid = steps;
    for (std::size_t gi = 0; gi < steps.size(); ++gi) {
        double m = 0.0;
        for (std::int64_t r = 0; r < n_envs; ++r) m += means[static_cast<std::size_t>(r)][gi];
        m /= static_cast<double>(n_envs);
        double s2 = 0.0;
        for (std::int64_t r = 0; r < n_envs; ++r) {
            const double dv = means[static_cast<std::size_t>(r)][gi] - m;
            s2 += dv * dv;
        }
        s2 /= static_cast<double>(n_envs - 1);
        series.deviation.push_back(std::abs(m - static_cast<double>(steps[gi]) * v));
        series.std_err.push_back(std::sqrt(s2 / static_cast<double>(n_envs)));
    }
    // least-squares trend of the deviation in n
    const std::size_t g = steps.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
        mx += static_cast<double>(steps[i]);
        my += series.deviation[i];
    }
    mx /= static_cast<double>(g);
    my /= static_cast<double>(g);
    double sxx = 0.0, sxy = 0.0, rss = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
        const double dx = static_cast<double>(steps[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (series.deviation[i] - my);
    }
    series.slope = sxy / sxx;
    for (std::size_t i = 0; i < g; ++i) {
        const double fit = my + series.slope * (static_cast<double>(steps[i]) - mx);
        rss += (series.deviation[i] - fit) * (series.deviation[i] - fit);
    }
    if (g > 2) series.slope_std_err = std::sqrt(rss / (static_cast<double>(g - 2) * sxx));
    return series;
}

} // namespace rwre

#include "rwre/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace rwre {

RenewalLaw::RenewalLaw(std::vector<std::pair<std::int64_t, double>> pmf) {
    if (pmf.empty()) throw std::invalid_argument("RenewalLaw: empty pmf");
    for (const auto& [k, p] : pmf) {
        if (k < 1) throw std::invalid_argument("RenewalLaw: support must be >= 1");
        if (!(p >= 0.0)) throw std::invalid_argument("RenewalLaw: negative probability");
        rho_ = std::max(rho_, k);
    }
    pmf_.assign(static_cast<std::size_t>(rho_) + 1, 0.0);
    double total = 0.0;
    for (const auto& [k, p] : pmf) {
        pmf_[static_cast<std::size_t>(k)] += p;
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("RenewalLaw: probabilities must sum to 1");
    h_ = 0;
    for (std::int64_t k = 1; k <= rho_; ++k) {
        if (pmf_[static_cast<std::size_t>(k)] > 0.0) h_ = std::gcd(h_, k);
    }
    cumulative_.assign(pmf_.size(), 0.0);
    double c = 0.0;
    for (std::size_t k = 0; k < pmf_.size(); ++k) {
        c += pmf_[k];
        cumulative_[k] = c;
    }
}

RenewalLaw RenewalLaw::uniform(std::int64_t lo, std::int64_t hi) {
    std::vector<std::pair<std::int64_t, double>> pmf;
    const double p = 1.0 / static_cast<double>(hi - lo + 1);
    for (std::int64_t k = lo; k <= hi; ++k) pmf.emplace_back(k, p);
    return RenewalLaw(std::move(pmf));
}

RenewalLaw RenewalLaw::constant(std::int64_t y) { return RenewalLaw({{y, 1.0}}); }

double RenewalLaw::pmf(std::int64_t k) const {
    if (k < 1 || k > rho_) return 0.0;
    return pmf_[static_cast<std::size_t>(k)];
}

double RenewalLaw::mean() const {
    double m = 0.0;
    for (std::int64_t k = 1; k <= rho_; ++k) m += static_cast<double>(k) * pmf(k);
    return m;
}

double RenewalLaw::moment(double p) const {
    double m = 0.0;
    for (std::int64_t k = 1; k <= rho_; ++k)
        m += std::pow(static_cast<double>(k), p) * pmf(k);
    return m;
}

std::int64_t RenewalLaw::sample(Rng& rng) const {
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::int64_t>(rho_, static_cast<std::int64_t>(it - cumulative_.begin()));
}

RenewalLaw RenewalLaw::divided_by_period() const {
    if (h_ == 1) return *this;
    std::vector<std::pair<std::int64_t, double>> reduced;
    for (std::int64_t k = 1; k <= rho_; ++k) {
        if (pmf(k) > 0.0) reduced.emplace_back(k / h_, pmf(k));
    }
    return RenewalLaw(std::move(reduced));
}

SampleLResult sample_L(const RenewalLaw& law, std::int64_t i, std::int64_t j, Rng& rng,
                       std::int64_t horizon) {
    const std::int64_t h = law.period_h();
    if (i % h != 0 || j % h != 0)
        throw std::invalid_argument("sample_L: delays must lie in h*N");
    if (i == j && i > 0) return {i, false};
    std::int64_t a = i, b = j;
    if (i == j) {   // i = j = 0: the restriction l >= 1 forces one step of each
        a = law.sample(rng);
        b = law.sample(rng);
    }
    while (a != b) {
        if (a > horizon || b > horizon) return {std::max(a, b), true};
        if (a < b) a += law.sample(rng); else b += law.sample(rng);
    }
    return {a, false};
}

std::int64_t forward_recurrence(const RenewalLaw& law, std::int64_t x, Rng& rng) {
    std::int64_t s = 0;
    while (s < x) s += law.sample(rng);
    return s - x;
}

namespace {

// Renewal function r[k] = P(k in {S_n}) for k = 0..kmax.
std::vector<double> renewal_function(const RenewalLaw& law, std::int64_t kmax) {
    std::vector<double> r(static_cast<std::size_t>(kmax) + 1, 0.0);
    r[0] = 1.0;
    for (std::int64_t k = 1; k <= kmax; ++k) {
        double s = 0.0;
        for (std::int64_t y = 1; y <= std::min(k, law.max_support()); ++y)
            s += law.pmf(y) * r[static_cast<std::size_t>(k - y)];
        r[static_cast<std::size_t>(k)] = s;
    }
    return r;
}

} // namespace

std::vector<double> overshoot_distribution(const RenewalLaw& law, std::int64_t x) {
    if (law.period_h() != 1)
        throw std::invalid_argument("overshoot_distribution: divide by the period first");
    if (x < 0) throw std::invalid_argument("overshoot_distribution: x >= 0 required");
    const std::int64_t rho = law.max_support();
    std::vector<double> dist(static_cast<std::size_t>(rho), 0.0);
    if (x == 0) {
        dist[0] = 1.0;
        return dist;
    }
    const auto r = renewal_function(law, x - 1);
    // overshoot m: last renewal at k < x, jump to x + m
    for (std::int64_t k = std::max<std::int64_t>(0, x - rho); k < x; ++k) {
        for (std::int64_t m = 0; m < rho; ++m) {
            const std::int64_t y = x + m - k;
            dist[static_cast<std::size_t>(m)] += r[static_cast<std::size_t>(k)] * law.pmf(y);
        }
    }
    return dist;
}

namespace {

// E_x[ sum of zeta-chain values after the current one ], x = 1..rho-1,
// from (I - Q) t = r with r(x) = E_x(zeta_1).
std::vector<double> zeta_sum_expectations(const RenewalLaw& law) {
    const std::int64_t rho = law.max_support();
    const auto n = static_cast<Eigen::Index>(rho - 1);
    if (n <= 0) return std::vector<double>(static_cast<std::size_t>(rho), 0.0);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::int64_t x = 1; x < rho; ++x) {
        const auto q = overshoot_distribution(law, x);
        for (std::int64_t y = 1; y < rho; ++y)
            A(x - 1, y - 1) -= q[static_cast<std::size_t>(y)];
        double mean_step = 0.0;
        for (std::int64_t y = 0; y < rho; ++y)
            mean_step += static_cast<double>(y) * q[static_cast<std::size_t>(y)];
        rhs(x - 1) = mean_step;
    }
    const Eigen::VectorXd t = A.partialPivLu().solve(rhs);
    std::vector<double> out(static_cast<std::size_t>(rho), 0.0);
    for (std::int64_t x = 1; x < rho; ++x) out[static_cast<std::size_t>(x)] = t(x - 1);
    return out;
}

double exact_mean_L0j(const RenewalLaw& law, std::int64_t j) {
    // j >= 1, h = 1: L_{0,j} = j + sum_{i>=1} zeta_i with zeta_1 = B^0_j.
    const auto t = zeta_sum_expectations(law);
    const auto q0 = overshoot_distribution(law, j);
    double e = static_cast<double>(j);
    for (std::size_t m = 0; m < q0.size(); ++m)
        e += q0[m] * (static_cast<double>(m) + t[m]);
    return e;
}

} // namespace

MomentResult exact_moment_L(const RenewalLaw& law, std::int64_t i, std::int64_t j, double p,
                            std::int64_t mc_samples, std::uint64_t seed) {
    const std::int64_t h = law.period_h();
    if (i % h != 0 || j % h != 0)
        throw std::invalid_argument("exact_moment_L: delays must lie in h*N");
    if (i > j) std::swap(i, j);
    if (i == j && i > 0)
        return {std::pow(static_cast<double>(i), p), 0.0, "exact-trivial"};

    if (p == 1.0) {
        const RenewalLaw base = law.divided_by_period();
        const double hh = static_cast<double>(h);
        double value = 0.0;
        if (i == 0 && j == 0) {
            // E(L_{0,0}) = sum_y P(Y = y) E(L_{0,y})
            for (std::int64_t y = 1; y <= base.max_support(); ++y) {
                if (base.pmf(y) > 0.0) value += base.pmf(y) * exact_mean_L0j(base, y);
            }
        } else if (i == 0) {
            value = exact_mean_L0j(base, j / h);
        } else {
            value = static_cast<double>(i / h) + exact_mean_L0j(base, (j - i) / h);
        }
        return {hh * value, 0.0, "exact-linear-system"};
    }

    // p > 1: Monte Carlo with a CI
    Rng rng(seed, static_cast<std::uint64_t>(i * 1000003 + j));
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t s = 0; s < mc_samples; ++s) {
        const auto res = sample_L(law, i, j, rng);
        const double v = std::pow(static_cast<double>(res.value), p);
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(mc_samples);
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    return {mean, std::sqrt(var / n), "mc"};
}

LDistribution distribution_L0j(const RenewalLaw& law, std::int64_t j, double tail_eps,
                               std::int64_t max_horizon) {
    if (law.period_h() != 1)
        throw std::invalid_argument("distribution_L0j: divide by the period first");
    if (j < 1) throw std::invalid_argument("distribution_L0j: j >= 1 required");
    const std::int64_t rho = law.max_support();

    // alive[x][s]: chain at overshoot x >= 1 with accumulated sum s
    // (the absorbing transition to 0 adds nothing to the sum).
    struct Layer {
        std::vector<std::vector<double>> by_state;   // by_state[x-1][s]
    };
    std::vector<std::vector<double>> q(static_cast<std::size_t>(rho));
    for (std::int64_t x = 1; x < rho; ++x)
        q[static_cast<std::size_t>(x)] = overshoot_distribution(law, x);

    std::int64_t horizon = std::max<std::int64_t>(4 * j + 16 * rho, 64);
    for (;;) {
        const auto H = static_cast<std::size_t>(horizon);
        std::vector<std::vector<double>> alive(
            static_cast<std::size_t>(std::max<std::int64_t>(rho - 1, 1)),
            std::vector<double>(H + 1, 0.0));
        LDistribution out;
        out.pmf.assign(H + 1, 0.0);

        // first step from zeta_0 = j
        const auto q0 = overshoot_distribution(law, j);
        out.pmf[static_cast<std::size_t>(j)] += q0[0];
        for (std::int64_t m = 1; m < rho; ++m) {
            const std::size_t s = static_cast<std::size_t>(j + m);
            if (s <= H) alive[static_cast<std::size_t>(m - 1)][s] += q0[static_cast<std::size_t>(m)];
        }

        // iterate the chain until the live mass is negligible
        double live = 1.0 - q0[0];
        std::int64_t guard = 0;
        while (live > tail_eps * 0.5 && guard < 8 * horizon) {
            std::vector<std::vector<double>> next(alive.size(),
                                                  std::vector<double>(H + 1, 0.0));
            double new_live = 0.0;
            for (std::int64_t x = 1; x < rho; ++x) {
                const auto& row = alive[static_cast<std::size_t>(x - 1)];
                const auto& qx = q[static_cast<std::size_t>(x)];
                for (std::size_t s = 0; s <= H; ++s) {
                    const double mass = row[s];
                    if (mass <= 0.0) continue;
                    out.pmf[s] += mass * qx[0];
                    for (std::int64_t m = 1; m < rho; ++m) {
                        const std::size_t s2 = s + static_cast<std::size_t>(m);
                        if (s2 <= H) {
                            next[static_cast<std::size_t>(m - 1)][s2] += mass * qx[static_cast<std::size_t>(m)];
                            new_live += mass * qx[static_cast<std::size_t>(m)];
                        }
                        // mass pushed past the horizon is tail mass; retried below
                    }
                }
            }
            alive.swap(next);
            live = new_live;
            ++guard;
        }

        double total = 0.0;
        for (double v : out.pmf) total += v;
        out.tail_mass = std::max(0.0, 1.0 - total);
        if (out.tail_mass <= tail_eps || horizon >= max_horizon) {
            double mean = 0.0;
            for (std::size_t s = 0; s <= H; ++s) mean += static_cast<double>(s) * out.pmf[s];
            out.mean_lower = mean;
            // crude but safe: tail mass sits somewhere above the horizon with
            // geometrically decaying overshoot sums; 2x horizon covers it for
            // reporting purposes when the mass is already ~tail_eps.
            out.mean_upper = mean + out.tail_mass * 2.0 * static_cast<double>(horizon);
            return out;
        }
        horizon *= 2;
    }
}

namespace {

struct Fit {
    double slope = 0.0;
    double std_err = 0.0;
};

Fit least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Fit f;
    f.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - my - f.slope * (x[i] - mx);
        rss += r * r;
    }
    if (n > 2) f.std_err = std::sqrt(rss / (static_cast<double>(n - 2) * sxx));
    return f;
}

} // namespace

MomentBoundReport verify_moment_bound(const RenewalLaw& law, double p,
                                      const std::vector<std::int64_t>& j_grid,
                                      std::int64_t mc_samples, std::uint64_t seed) {
    MomentBoundReport report;
    report.j_grid = j_grid;
    report.method = (p == 1.0) ? "exact-linear-system" : "mc";
    for (std::size_t gi = 0; gi < j_grid.size(); ++gi) {
        const std::int64_t j = j_grid[gi];
        const auto m = exact_moment_L(law, 0, j, p, mc_samples, hash_combine(seed, gi));
        report.moments.push_back(m.value);
        report.std_errs.push_back(m.std_err);
        report.ratios.push_back(m.value / (1.0 + std::pow(static_cast<double>(j), p)));
    }
    report.C_hat = *std::max_element(report.ratios.begin(), report.ratios.end());
    std::vector<double> lx, ly;
    for (std::size_t gi = 0; gi < j_grid.size(); ++gi) {
        lx.push_back(std::log(static_cast<double>(j_grid[gi])));
        ly.push_back(std::log(report.ratios[gi]));
    }
    const auto fit = least_squares_slope(lx, ly);
    report.slope = fit.slope;
    report.slope_std_err = fit.std_err;

    const std::size_t half = j_grid.size() / 2;
    const std::vector<double> tx(lx.begin() + static_cast<std::ptrdiff_t>(half), lx.end());
    const std::vector<double> ty(ly.begin() + static_cast<std::ptrdiff_t>(half), ly.end());
    if (tx.size() >= 3) {
        const auto tail_fit = least_squares_slope(tx, ty);
        report.tail_slope = tail_fit.slope;
        report.tail_slope_std_err = tail_fit.std_err;
        double j_med = static_cast<double>(j_grid[half + (j_grid.size() - half) / 2]);
        report.approach_allowance = 8.0 / j_med;
        report.growth_detected =
            report.tail_slope > 4.0 * report.tail_slope_std_err + report.approach_allowance;
    }
    return report;
}

std::vector<double> zeta_moment_check(const RenewalLaw& law, double p,
                                      const std::vector<std::int64_t>& x_grid) {
    const RenewalLaw base = law.divided_by_period();
    const double denom = base.moment(p + 1.0);
    std::vector<double> ratios;
    for (const std::int64_t x : x_grid) {
        if (x == 0) {
            ratios.push_back(0.0);   // the zeta-chain absorbs at 0
            continue;
        }
        const auto q = overshoot_distribution(base, x);
        double m = 0.0;
        for (std::size_t y = 1; y < q.size(); ++y)
            m += q[y] * std::pow(static_cast<double>(y), p);
        ratios.push_back(m / denom);
    }
    return ratios;
}

TailReport nu0_tail(const RenewalLaw& law, std::int64_t x,
                    const std::vector<std::int64_t>& n_grid,
                    std::int64_t replicates, std::uint64_t seed) {
    const RenewalLaw base = law.divided_by_period();
    TailReport report;
    report.n_grid = n_grid;
    const std::int64_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
    std::vector<std::int64_t> nu(static_cast<std::size_t>(replicates));
    Rng rng(seed, static_cast<std::uint64_t>(x));
    for (std::int64_t r = 0; r < replicates; ++r) {
        std::int64_t state = x / law.period_h();
        std::int64_t steps = 0;
        while (state != 0 && steps <= n_max + 1) {
            state = forward_recurrence(base, state, rng);
            ++steps;
        }
        nu[static_cast<std::size_t>(r)] = steps;
    }
    std::vector<double> lx, ly;
    for (const std::int64_t n : n_grid) {
        std::int64_t count = 0;
        for (const auto v : nu) count += (v > n) ? 1 : 0;
        const double phat = static_cast<double>(count) / static_cast<double>(replicates);
        report.survival.push_back(phat);
        report.std_errs.push_back(std::sqrt(phat * (1.0 - phat) / static_cast<double>(replicates)));
        if (phat > 0.0) {
            lx.push_back(static_cast<double>(n));
            ly.push_back(std::log(phat));
        }
    }
    if (lx.size() >= 3) {
        const auto fit = least_squares_slope(lx, ly);
        report.log_slope = fit.slope;
        report.log_slope_std_err = fit.std_err;
    }
    return report;
}

double nu0_survival_exact(const RenewalLaw& law, std::int64_t x, std::int64_t n) {
    const RenewalLaw base = law.divided_by_period();
    const std::int64_t rho = base.max_support();
    std::vector<double> mass(static_cast<std::size_t>(std::max<std::int64_t>(rho, 2)), 0.0);
    const std::int64_t x0 = x / law.period_h();
    if (x0 == 0) return 0.0;
    // first step may start above the transient range
    if (x0 < rho) {
        mass[static_cast<std::size_t>(x0)] = 1.0;
    } else {
        const auto q = overshoot_distribution(base, x0);
        for (std::int64_t y = 1; y < rho; ++y)
            mass[static_cast<std::size_t>(y)] = q[static_cast<std::size_t>(y)];
        if (n == 0) {
            double alive = 0.0;
            for (double v : mass) alive += v;
            return alive;
        }
        --n;
    }
    for (std::int64_t step = 0; step < n; ++step) {
        std::vector<double> next(mass.size(), 0.0);
        for (std::int64_t s = 1; s < rho; ++s) {
            const double m = mass[static_cast<std::size_t>(s)];
            if (m <= 0.0) continue;
            const auto q = overshoot_distribution(base, s);
            for (std::int64_t y = 1; y < rho; ++y)
                next[static_cast<std::size_t>(y)] += m * q[static_cast<std::size_t>(y)];
        }
        mass.swap(next);
    }
    double alive = 0.0;
    for (double v : mass) alive += v;
    return alive;
}

} // namespace rwre

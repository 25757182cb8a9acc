#include "rwre/exactq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rwre {

SiteMassFunction forward_law(const Environment& env, const Lattice& x0, std::int64_t n,
                             const ForwardOptions& opts) {
    SiteMassFunction f;
    f.mass[x0] = 1.0;
    for (std::int64_t step = 0; step < n; ++step) {
        std::map<Lattice, double, LatticeLess> next;
        for (const auto& [x, m] : f.mass) {
            const auto& jd = env.site_env(x);
            for (const auto& a : jd.atoms()) {
                if (a.p <= 0.0) continue;
                next[x + a.z] += m * a.p;
            }
        }
        f.mass.clear();
        for (auto& [x, m] : next) {
            if (m < opts.prune_threshold) {
                f.leak += m;
            } else {
                f.mass.emplace(x, m);
            }
        }
        if (static_cast<std::int64_t>(f.mass.size()) > opts.support_cap) {
            throw std::runtime_error(
                "forward_law: support cap exceeded; raise the pruning threshold");
        }
    }
    return f;
}

QuenchedMean quenched_mean(const Environment& env, const Lattice& x0, std::int64_t n,
                           const ForwardOptions& opts) {
    const auto f = forward_law(env, x0, n, opts);
    QuenchedMean out;
    out.mean = Vec::Zero(env.dim());
    for (const auto& [x, m] : f.mass) out.mean += m * to_real(x);
    out.leak = f.leak;
    return out;
}

std::vector<Moments1d> quenched_moments_1d(const Environment& env,
                                           std::span<const std::int64_t> steps) {
    if (env.dim() != 1) throw std::invalid_argument("quenched_moments_1d: d = 1 required");
    std::int64_t n_max = 0;
    for (const auto s : steps) n_max = std::max(n_max, s);
    const std::int64_t R = env.law().max_abs_jump();
    const std::int64_t top = n_max * R + 1;

    // per-site dense jump tables over the reachable range
    const auto& atoms = env.law().site_law().atoms();
    std::vector<std::vector<double>> atom_probs(atoms.size(),
                                                std::vector<double>(static_cast<std::size_t>(R) + 1, 0.0));
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        for (const auto& jump : atoms[a].jd.atoms())
            atom_probs[a][static_cast<std::size_t>(jump.z[0])] = jump.p;
    }
    std::vector<std::uint32_t> site_atom(static_cast<std::size_t>(top) + 1);
    for (std::int64_t x = 0; x <= top; ++x) {
        Lattice p(1);
        p[0] = x;
        site_atom[static_cast<std::size_t>(x)] = static_cast<std::uint32_t>(env.site_atom_id(p));
    }

    std::vector<double> mass(static_cast<std::size_t>(top) + 1, 0.0);
    mass[0] = 1.0;
    std::int64_t hi = 0;

    std::vector<Moments1d> out;
    std::vector<std::int64_t> sorted(steps.begin(), steps.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t next_readout = 0;

    auto read_moments = [&](std::int64_t n) {
        double m1 = 0.0, m2 = 0.0;
        for (std::int64_t x = 0; x <= hi; ++x) {
            const double p = mass[static_cast<std::size_t>(x)];
            const double xv = static_cast<double>(x);
            m1 += p * xv;
            m2 += p * xv * xv;
        }
        out.push_back({n, m1, std::max(0.0, m2 - m1 * m1)});
    };

    for (std::int64_t n = 0; n <= n_max; ++n) {
        while (next_readout < sorted.size() && sorted[next_readout] == n) {
            read_moments(n);
            ++next_readout;
        }
        if (n == n_max) break;
        // in place, descending: each mass value is consumed exactly once
        for (std::int64_t x = hi; x >= 0; --x) {
            const double m = mass[static_cast<std::size_t>(x)];
            if (m == 0.0) continue;
            const auto& probs = atom_probs[site_atom[static_cast<std::size_t>(x)]];
            mass[static_cast<std::size_t>(x)] = m * probs[0];
            for (std::int64_t j = 1; j <= R; ++j) {
                if (probs[static_cast<std::size_t>(j)] > 0.0)
                    mass[static_cast<std::size_t>(x + j)] += m * probs[static_cast<std::size_t>(j)];
            }
        }
        hi = std::min(hi + R, top);
    }
    return out;
}

double hitting_prob_1d(const Environment& env, std::int64_t x, std::int64_t i) {
    if (env.dim() != 1) throw std::invalid_argument("hitting_prob_1d: d = 1 required");
    if (x > i) throw std::invalid_argument("hitting_prob_1d: x <= i required");
    if (x == i) return 1.0;
    const std::int64_t R = env.law().max_abs_jump();
    // holding eliminated analytically: condition on the first nonzero jump
    std::vector<double> P(static_cast<std::size_t>(i - x) + 1, 0.0);
    P[static_cast<std::size_t>(i - x)] = 1.0;
    for (std::int64_t s = i - 1; s >= x; --s) {
        Lattice pos(1);
        pos[0] = s;
        const auto probs = embedded_jump_probs(env.site_env(pos), R);
        double v = 0.0;
        for (std::int64_t j = 1; j <= R && s + j <= i; ++j)
            v += probs[static_cast<std::size_t>(j)] * P[static_cast<std::size_t>(s + j - x)];
        P[static_cast<std::size_t>(s - x)] = v;
    }
    return P[0];
}

namespace {

struct SiteData {
    std::vector<double> embedded;   // holding-free jump probs, index 1..R
    double esc = 1.0;               // 1 - pi_00
    double g = 0.0;                 // D - v
};

SiteData site_data(const Environment& env, std::int64_t pos, double v, std::int64_t R) {
    Lattice x(1);
    x[0] = pos;
    const auto& jd = env.site_env(x);
    SiteData d;
    d.embedded = embedded_jump_probs(jd, R);
    d.esc = 1.0 - jd.holding_prob();
    d.g = jd.drift()[0] - v;
    return d;
}

} // namespace

CorrectorTable corrector(const Environment& env, std::int64_t base, double v,
                         const CorrectorOptions& opts) {
    if (env.dim() != 1) throw std::invalid_argument("corrector: d = 1 required");
    const auto& law = env.law();
    const std::int64_t R = law.max_abs_jump();

    // deterministic pieces of the tail envelope
    const double p = opts.moment_p;
    const double M = law.moment_M(p);
    const double delta = law.delta();
    const double env_factor = std::pow(M / delta, p / (p - 1.0));
    double g_max = 0.0;
    bool g_zero = true;
    for (const auto& a : law.site_law().atoms()) {
        const double g = a.jd.drift()[0] - v;
        g_max = std::max(g_max, std::abs(g));
        if (std::abs(g) > 1e-14) g_zero = false;
    }

    CorrectorTable table;
    if (g_zero) {
        // D = v everywhere: the series vanishes termwise
        table.a.push_back(1.0 / site_data(env, base, v, R).esc);
        return table;
    }

    std::int64_t window = std::max<std::int64_t>(32, 4 * R);
    for (;;) {
        window = std::min(window, opts.max_index);
        const auto pair = quenched_pair_survival(env, base, 1, window);

        std::vector<SiteData> sites;
        sites.reserve(static_cast<std::size_t>(window) + 1);
        for (std::int64_t s = 0; s <= window; ++s) sites.push_back(site_data(env, base + s, v, R));

        // forward window recursion for P_0(V_m), P_1(V_m)
        std::vector<double> P0(static_cast<std::size_t>(window) + 1, 0.0);
        std::vector<double> P1(static_cast<std::size_t>(window) + 1, 0.0);
        P0[0] = 1.0;
        if (window >= 1) P1[1] = 1.0;
        for (std::int64_t m = 1; m <= window; ++m) {
            double v0 = 0.0, v1 = 0.0;
            for (std::int64_t j = 1; j <= std::min(R, m); ++j) {
                const double pj = sites[static_cast<std::size_t>(m - j)].embedded[static_cast<std::size_t>(j)];
                if (pj <= 0.0) continue;
                v0 += pj * P0[static_cast<std::size_t>(m - j)];
                if (m - j >= 1) v1 += pj * P1[static_cast<std::size_t>(m - j)];
            }
            P0[static_cast<std::size_t>(m)] = v0;
            if (m >= 2) P1[static_cast<std::size_t>(m)] = v1;
        }

        table.a.clear();
        table.delta_value = 0.0;
        for (std::int64_t m = 0; m <= window; ++m) {
            const auto& sd = sites[static_cast<std::size_t>(m)];
            const double am = (P0[static_cast<std::size_t>(m)] - P1[static_cast<std::size_t>(m)]) / sd.esc;
            table.a.push_back(am);
            table.delta_value += am * sd.g;
            // stop as soon as the certified tail beyond m is small enough
            const double tail = env_factor * g_max * survival_tail_sum(pair, m);
            if (tail <= opts.tol || m == window) {
                table.truncation_index = m;
                table.tail_bound = tail;
                break;
            }
        }
        if (table.tail_bound <= opts.tol) return table;
        if (window >= opts.max_index) {
            throw std::runtime_error("corrector: tolerance unreachable within index cap; achieved " +
                                     std::to_string(table.tail_bound));
        }
        window *= 2;
    }
}

CorrectorTable corrector(const Environment& env, std::int64_t base, const CorrectorOptions& opts) {
    return corrector(env, base, exact_velocity_1d(env.law()), opts);
}

ChiValue chi(const Environment& env, std::int64_t x, double v, const CorrectorOptions& opts) {
    if (x < 0) throw std::invalid_argument("chi: x >= 0 required");
    ChiValue out;
    for (std::int64_t y = 0; y < x; ++y) {
        const auto table = corrector(env, y, v, opts);
        out.value += table.delta_value;
        out.bound += table.tail_bound;
    }
    return out;
}

MartingaleResidual martingale_residual(const Environment& env, const CorrectorOptions& opts) {
    const double v = exact_velocity_1d(env.law());
    const Lattice origin = Lattice::Zero(1);
    const auto& jd = env.site_env(origin);
    const double g = jd.drift()[0] - v;

    const std::int64_t R = env.law().max_abs_jump();
    std::vector<ChiValue> chis(static_cast<std::size_t>(R) + 1);
    for (std::int64_t y = 1; y <= R; ++y) chis[static_cast<std::size_t>(y)] = chi(env, y, v, opts);

    MartingaleResidual out;
    double expect = 0.0;
    for (const auto& a : jd.atoms()) {
        const std::int64_t y = a.z[0];
        if (y == 0 || a.p <= 0.0) continue;
        expect += a.p * chis[static_cast<std::size_t>(y)].value;
        out.bound += a.p * chis[static_cast<std::size_t>(y)].bound;
    }
    out.residual = expect - g;
    return out;
}

std::vector<double> corrector_coefficients(const Environment& env, std::int64_t base,
                                           std::int64_t count) {
    const std::int64_t R = env.law().max_abs_jump();
    std::vector<SiteData> sites;
    for (std::int64_t s = 0; s <= count; ++s) sites.push_back(site_data(env, base + s, 0.0, R));

    std::vector<double> P0(static_cast<std::size_t>(count) + 1, 0.0);
    std::vector<double> P1(static_cast<std::size_t>(count) + 1, 0.0);
    P0[0] = 1.0;
    if (count >= 1) P1[1] = 1.0;
    for (std::int64_t m = 1; m <= count; ++m) {
        double v0 = 0.0, v1 = 0.0;
        for (std::int64_t j = 1; j <= std::min(R, m); ++j) {
            const double pj = sites[static_cast<std::size_t>(m - j)].embedded[static_cast<std::size_t>(j)];
            if (pj <= 0.0) continue;
            v0 += pj * P0[static_cast<std::size_t>(m - j)];
            if (m - j >= 1) v1 += pj * P1[static_cast<std::size_t>(m - j)];
        }
        P0[static_cast<std::size_t>(m)] = v0;
        if (m >= 2) P1[static_cast<std::size_t>(m)] = v1;
    }
    std::vector<double> a(static_cast<std::size_t>(count) + 1);
    for (std::int64_t m = 0; m <= count; ++m) {
        a[static_cast<std::size_t>(m)] =
            (P0[static_cast<std::size_t>(m)] - P1[static_cast<std::size_t>(m)]) /
            sites[static_cast<std::size_t>(m)].esc;
    }
    return a;
}

double corrector_convolution_identity(const Environment& env, std::int64_t i, double,
                                      const CorrectorOptions&) {
    if (i < 1) throw std::invalid_argument("corrector_convolution_identity: i >= 1 required");
    const Lattice origin = Lattice::Zero(1);
    const auto& jd = env.site_env(origin);

    double total = 0.0;
    for (std::int64_t j = 0; j <= i; ++j) {
        const std::int64_t k = i - j;
        double tail = 0.0;   // sum_{y > k} pi_{0y}(omega)
        for (const auto& a : jd.atoms()) {
            if (a.z[0] > k) tail += a.p;
        }
        if (tail == 0.0) continue;
        const auto a_table = corrector_coefficients(env, k, j);
        total += a_table[static_cast<std::size_t>(j)] * tail;
    }
    return total;
}

ExpBoundResult exp_bound_check(const Environment& env, const Lattice& x, std::int64_t n,
                               double lambda, double moment_p) {
    const auto& law = env.law();
    const double lam0 = lambda0(law, moment_p);
    if (lambda < 0.0 || lambda > lam0)
        throw std::invalid_argument("exp_bound_check: lambda outside [0, lambda0]");
    ForwardOptions opts;
    opts.prune_threshold = 0.0;   // the inequality check must not drop mass
    const auto f = forward_law(env, x, n, opts);
    const Vec u = to_real(law.u_hat());
    double lhs = 0.0;
    for (const auto& [pos, m] : f.mass) lhs += m * std::exp(-lambda * to_real(pos).dot(u));
    const double rhs = std::exp(-lambda * to_real(x).dot(u)) *
                       std::pow(1.0 - lambda * law.delta() / 2.0, static_cast<double>(n));
    return {lhs, rhs};
}

} // namespace rwre

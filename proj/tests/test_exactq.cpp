#include <doctest.h>

#include <cmath>

#include "rwre/exactq.hpp"
#include "rwre/presets.hpp"
#include "rwre/walk.hpp"

using namespace rwre;

namespace {

// binomial pmf oracle for the constant pi_01 = 1/2 environment
double binom_pmf(std::int64_t n, std::int64_t k) {
    double logp = 0.0;
    for (std::int64_t i = 1; i <= n; ++i) logp += std::log(static_cast<double>(i));
    for (std::int64_t i = 1; i <= k; ++i) logp -= std::log(static_cast<double>(i));
    for (std::int64_t i = 1; i <= n - k; ++i) logp -= std::log(static_cast<double>(i));
    return std::exp(logp - static_cast<double>(n) * std::log(2.0));
}

EnvironmentLaw half_half_law() {
    SiteLaw law({{1.0, JumpDistribution({{make_lattice({0}), 0.5}, {make_lattice({1}), 0.5}})}});
    return EnvironmentLaw(law, make_lattice({1}));
}

} // namespace

TEST_CASE("forward law point mass and binomial closed form") {
    const Environment det(preset_law("deterministic"), 3);
    const auto f = forward_law(det, Lattice::Zero(1), 3);
    REQUIRE(f.mass.size() == 1);
    CHECK(f.mass.begin()->first[0] == 3);
    CHECK(f.mass.begin()->second == doctest::Approx(1.0));

    const Environment half(half_half_law(), 5);
    const std::int64_t n = 30;
    const auto g = forward_law(half, Lattice::Zero(1), n);
    for (const auto& [x, p] : g.mass)
        CHECK(p == doctest::Approx(binom_pmf(n, x[0])).epsilon(1e-10));
}

TEST_CASE("conservation of mass with pruning ledger") {
    const Environment env(preset_law("one-two-jump"), 17);
    const auto f = forward_law(env, Lattice::Zero(1), 100);
    CHECK(std::abs(f.total() + f.leak - 1.0) <= 1e-9);

    const Environment env2(preset_law("abscont"), 23);
    const auto f2 = forward_law(env2, Lattice::Zero(2), 60);
    CHECK(std::abs(f2.total() + f2.leak - 1.0) <= 1e-9);
}

TEST_CASE("support cap trips on unpruned growth") {
    const Environment env(preset_law("abscont"), 23);
    ForwardOptions opts;
    opts.prune_threshold = 0.0;
    opts.support_cap = 16;
    CHECK_THROWS_WITH_AS(forward_law(env, Lattice::Zero(2), 30, opts),
                         doctest::Contains("pruning threshold"), std::runtime_error);
}

TEST_CASE("quenched mean") {
    const Environment det(preset_law("deterministic"), 1);
    CHECK(quenched_mean(det, Lattice::Zero(1), 7).mean[0] == doctest::Approx(7.0));

    // n = 1: mean is the local drift at the start
    const Environment env(preset_law("lazy-nn"), 29);
    const Lattice x0 = make_lattice({4});
    const auto m1 = quenched_mean(env, x0, 1);
    CHECK(m1.mean[0] == doctest::Approx(4.0 + env.site_env(x0).drift()[0]));
}

TEST_CASE("quenched mean against Monte Carlo") {
    const auto law = preset_law("lazy-nn");
    Rng pick(20240301);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t env_seed = pick.next_u64();
        const std::int64_t n = 20 + static_cast<std::int64_t>(pick.next_u64() % 180);
        const Environment env(law, env_seed);
        const auto exact = quenched_mean(env, Lattice::Zero(1), n);
        const std::int64_t reps = 4000;
        double mc = 0.0, mc2 = 0.0;
        for (std::int64_t r = 0; r < reps; ++r) {
            const auto path = run_quenched(env, Lattice::Zero(1), n, 1000 + static_cast<std::uint64_t>(r));
            const double xn = static_cast<double>(path.position_at(static_cast<std::size_t>(n))[0]);
            mc += xn;
            mc2 += xn * xn;
        }
        mc /= static_cast<double>(reps);
        const double var = mc2 / static_cast<double>(reps) - mc * mc;
        const double se = std::sqrt(var / static_cast<double>(reps));
        CHECK(std::abs(exact.mean[0] - mc) <= 4.0 * se + 1e-9);
    }
}

TEST_CASE("dense 1d moments agree with the map-based propagation") {
    const auto law = preset_law("one-two-jump");
    for (std::uint64_t seed : {3u, 14u, 159u}) {
        const Environment env(law, seed);
        const std::array<std::int64_t, 2> steps{57, 128};
        const auto fast = quenched_moments_1d(env, steps);
        for (const auto& mom : fast) {
            const auto f = forward_law(env, Lattice::Zero(1), mom.n);
            double m1 = 0.0, m2 = 0.0;
            for (const auto& [x, p] : f.mass) {
                m1 += p * static_cast<double>(x[0]);
                m2 += p * static_cast<double>(x[0]) * static_cast<double>(x[0]);
            }
            CHECK(mom.mean == doctest::Approx(m1).epsilon(1e-10));
            CHECK(mom.variance == doctest::Approx(m2 - m1 * m1).epsilon(1e-8));
        }
    }
}

TEST_CASE("hitting probabilities") {
    const Environment env(preset_law("one-two-jump"), 41);
    CHECK(hitting_prob_1d(env, 5, 5) == 1.0);

    // nearest-neighbor environments cannot jump over a site
    const Environment nn(preset_law("lazy-nn"), 47);
    for (std::int64_t i = 1; i <= 30; ++i) CHECK(hitting_prob_1d(nn, 0, i) == doctest::Approx(1.0));

    // one-step conditioning at a site with no holding
    const Lattice origin = Lattice::Zero(1);
    const auto& jd = env.site_env(origin);
    const double p1 = jd.prob_of(make_lattice({1}));
    const double p2 = jd.prob_of(make_lattice({2}));
    CHECK(hitting_prob_1d(env, 0, 1) == doctest::Approx(p1 / (p1 + p2)));
}

TEST_CASE("corrector closed form on lazy-nn") {
    const auto law = preset_law("lazy-nn");
    const double v = exact_velocity_1d(law);
    CHECK(v == doctest::Approx(2.0 / 3.0));
    for (std::uint64_t seed = 0; seed < 24; ++seed) {
        const Environment env(law, seed);
        const auto table = corrector(env, 0);
        const double p01 = 1.0 - env.site_env(Lattice::Zero(1)).holding_prob();
        CHECK(table.a[0] == doctest::Approx(1.0 / p01));
        for (std::size_t i = 1; i < table.a.size(); ++i) CHECK(table.a[i] == doctest::Approx(0.0));
        CHECK(table.delta_value == doctest::Approx((p01 - v) / p01));
        CHECK(table.tail_bound <= 1e-12);
    }
}

TEST_CASE("corrector vanishes when the drift is constant") {
    const auto law = preset_law("const-drift");
    const Environment env(law, 3);
    const auto table = corrector(env, 0);
    CHECK(table.delta_value == 0.0);
    CHECK(table.tail_bound == 0.0);
}

TEST_CASE("corrector mean and envelope") {
    const auto law = preset_law("one-two-jump");
    const double env_factor = std::pow(law.moment_M(2.0) / law.delta(), 2.0);
    double mean = 0.0;
    const std::int64_t n_envs = 100'000;
    for (std::int64_t seed = 0; seed < n_envs; ++seed) {
        const Environment env(law, static_cast<std::uint64_t>(seed));
        const auto table = corrector(env, 0);
        mean += table.delta_value;
        for (const double a : table.a) CHECK(std::abs(a) <= env_factor + 1e-12);
    }
    mean /= static_cast<double>(n_envs);
    // E(Delta) = 0; Var(Delta) is O(1) so 4 sigma over 2e4 environments
    CHECK(std::abs(mean) <= 4.0 * 0.5 / std::sqrt(static_cast<double>(n_envs)));
}

TEST_CASE("chi basics") {
    const auto law = preset_law("lazy-nn");
    const double v = exact_velocity_1d(law);
    const Environment env(law, 8);
    CHECK(chi(env, 0, v).value == 0.0);
    // closed form: chi(x) = sum_{y<x} (pi_01(T_y w) - v)/pi_01(T_y w)
    double expect = 0.0;
    for (std::int64_t y = 0; y < 5; ++y) {
        Lattice pos(1);
        pos[0] = y;
        const double p01 = 1.0 - env.site_env(pos).holding_prob();
        expect += (p01 - v) / p01;
    }
    CHECK(chi(env, 5, v).value == doctest::Approx(expect));

    const Environment cd(preset_law("const-drift"), 9);
    CHECK(chi(cd, 7, exact_velocity_1d(preset_law("const-drift"))).value == doctest::Approx(0.0));
}

TEST_CASE("martingale identity") {
    SUBCASE("degenerate law: exact zero") {
        const Environment env(preset_law("const-drift"), 12);
        const auto res = martingale_residual(env);
        CHECK(res.residual == doctest::Approx(0.0));
    }
    SUBCASE("lazy-nn: closed-form cancellation") {
        for (std::uint64_t seed = 100; seed < 200; ++seed) {
            const Environment env(preset_law("lazy-nn"), seed);
            const auto res = martingale_residual(env);
            CHECK(std::abs(res.residual) <= res.bound + 1e-10);
        }
    }
    SUBCASE("one-two-jump: residual within the truncation certificate") {
        for (std::uint64_t seed = 300; seed < 400; ++seed) {
            const Environment env(preset_law("one-two-jump"), seed);
            const auto res = martingale_residual(env);
            CHECK(std::abs(res.residual) <= res.bound + 1e-10);
        }
    }
}

TEST_CASE("corrector convolution identity") {
    for (const char* name : {"lazy-nn", "one-two-jump"}) {
        const auto law = preset_law(name);
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            const Environment env(law, seed);
            for (std::int64_t i = 1; i <= 6; ++i)
                CHECK(std::abs(corrector_convolution_identity(env, i)) <= 1e-10);
        }
    }
}

TEST_CASE("step moment bound E^w |X_m|^p <= M^p m^p, exact propagation") {
    const auto law = preset_law("one-two-jump");
    const double M2 = law.moment_M(2.0);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Environment env(law, seed);
        for (std::int64_t m : {1, 4, 12, 25}) {
            const auto f = forward_law(env, Lattice::Zero(1), m);
            double second = 0.0;
            for (const auto& [x, p] : f.mass)
                second += p * static_cast<double>(x[0]) * static_cast<double>(x[0]);
            CHECK(second <= M2 * M2 * static_cast<double>(m) * static_cast<double>(m) + 1e-12);
        }
    }
}

TEST_CASE("exponential bound, exact propagation") {
    const auto law = preset_law("one-two-jump");

    SUBCASE("lambda = 0 is an equality") {
        const Environment env(law, 2);
        const auto r = exp_bound_check(env, Lattice::Zero(1), 10, 0.0);
        CHECK(r.lhs == doctest::Approx(1.0));
        CHECK(r.rhs == doctest::Approx(1.0));
    }
    SUBCASE("deterministic plug-in") {
        const Environment det(preset_law("deterministic"), 2);
        const double lam = lambda0(preset_law("deterministic"), 2.0) / 2.0;
        const auto r = exp_bound_check(det, make_lattice({2}), 8, lam);
        CHECK(r.lhs == doctest::Approx(std::exp(-lam * 10.0)));
        CHECK(r.lhs <= r.rhs);
    }
    SUBCASE("random environments never violate the bound") {
        const double lam = lambda0(law, 2.0) / 2.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Environment env(law, seed);
            for (std::int64_t n : {1, 5, 17, 30}) {
                const auto r = exp_bound_check(env, Lattice::Zero(1), n, lam);
                CHECK(r.lhs <= r.rhs * (1.0 + 1e-12));
            }
        }
    }
    SUBCASE("lambda out of range is rejected") {
        const Environment env(law, 2);
        CHECK_THROWS(exp_bound_check(env, Lattice::Zero(1), 5, 10.0));
    }
}

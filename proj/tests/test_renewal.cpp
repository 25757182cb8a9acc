#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwre/renewal.hpp"

using namespace rwre;

TEST_CASE("period of the support") {
    CHECK(RenewalLaw::uniform(1, 2).period_h() == 1);
    CHECK(RenewalLaw({{2, 0.5}, {4, 0.5}}).period_h() == 2);
    CHECK(RenewalLaw({{3, 0.5}, {5, 0.5}}).period_h() == 1);
    CHECK(RenewalLaw::constant(1).period_h() == 1);
}

TEST_CASE("sample_L basics") {
    Rng rng(5);
    const auto u12 = RenewalLaw::uniform(1, 2);

    // L_{i,i} = i for i > 0, no sampling involved
    CHECK(sample_L(u12, 3, 3, rng).value == 3);

    const auto ones = RenewalLaw::constant(1);
    CHECK(sample_L(ones, 0, 5, rng).value == 5);
    CHECK(sample_L(ones, 0, 0, rng).value == 1);

    // delays must respect the period
    const auto evens = RenewalLaw({{2, 0.5}, {4, 0.5}});
    CHECK_THROWS(sample_L(evens, 1, 2, rng));
    CHECK(sample_L(evens, 2, 2, rng).value == 2);
}

TEST_CASE("forward recurrence") {
    Rng rng(6);
    const auto u12 = RenewalLaw::uniform(1, 2);
    CHECK(forward_recurrence(u12, 0, rng) == 0);
    const auto ones = RenewalLaw::constant(1);
    for (int x = 0; x < 8; ++x) CHECK(forward_recurrence(ones, x, rng) == 0);

    // Y uniform{1,2}, x = 1: overshoot 0 or 1 with probability 1/2 each
    std::int64_t zeros = 0;
    const std::int64_t n = 100'000;
    for (std::int64_t i = 0; i < n; ++i) zeros += forward_recurrence(u12, 1, rng) == 0 ? 1 : 0;
    const double phat = static_cast<double>(zeros) / static_cast<double>(n);
    CHECK(std::abs(phat - 0.5) <= 4.0 * std::sqrt(0.25 / static_cast<double>(n)));

    // exact overshoot law agrees
    const auto q = overshoot_distribution(u12, 1);
    CHECK(q[0] == doctest::Approx(0.5));
    CHECK(q[1] == doctest::Approx(0.5));
}

TEST_CASE("exact first moments") {
    const auto ones = RenewalLaw::constant(1);
    for (std::int64_t j = 1; j <= 5; ++j)
        CHECK(exact_moment_L(ones, 0, j, 1.0).value == doctest::Approx(static_cast<double>(j)));
    CHECK(exact_moment_L(ones, 0, 0, 1.0).value == doctest::Approx(1.0));

    // L_{i,i}^p = i^p exactly
    for (const double p : {1.0, 2.0, 3.0})
        CHECK(exact_moment_L(RenewalLaw::uniform(1, 5), 4, 4, p).value ==
              doctest::Approx(std::pow(4.0, p)));

    // i < j reduction
    const auto u12 = RenewalLaw::uniform(1, 2);
    const double direct = exact_moment_L(u12, 2, 7, 1.0).value;
    const double reduced = 2.0 + exact_moment_L(u12, 0, 5, 1.0).value;
    CHECK(direct == doctest::Approx(reduced));
}

TEST_CASE("linear system vs distribution DP vs Monte Carlo") {
    const auto u12 = RenewalLaw::uniform(1, 2);
    for (std::int64_t j : {1, 2, 5, 11, 40}) {
        const double exact = exact_moment_L(u12, 0, j, 1.0).value;
        const auto dist = distribution_L0j(u12, j, 1e-13);
        CHECK(dist.tail_mass <= 1e-12);
        CHECK(std::abs(exact - dist.mean_lower) <= 1e-9);
    }
    // MC cross check at j = 0 (the paper's L_{0,0} reduction)
    Rng rng(77);
    const std::int64_t n = 200'000;
    double mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto s = sample_L(u12, 0, 0, rng);
        CHECK(s.value >= 1);
        mean += static_cast<double>(s.value);
    }
    mean /= static_cast<double>(n);
    const double exact00 = exact_moment_L(u12, 0, 0, 1.0).value;
    CHECK(std::abs(mean - exact00) <= 4.0 * 2.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("h-rescaling is exact") {
    const auto u12 = RenewalLaw::uniform(1, 2);
    const auto u24 = RenewalLaw({{2, 0.5}, {4, 0.5}});
    for (std::int64_t j : {1, 3, 9}) {
        CHECK(exact_moment_L(u24, 0, 2 * j, 1.0).value ==
              doctest::Approx(2.0 * exact_moment_L(u12, 0, j, 1.0).value));
    }
}

TEST_CASE("distributional reduction L_{i,j} = i + L_{0,j-i}") {
    // two-sample KS between sampled L_{2,7} and 2 + sampled L_{0,5}
    const auto u13 = RenewalLaw::uniform(1, 3);
    Rng rng_a(11), rng_b(12);
    const std::int64_t n = 40'000;
    std::vector<double> a, b;
    for (std::int64_t i = 0; i < n; ++i) {
        a.push_back(static_cast<double>(sample_L(u13, 2, 7, rng_a).value));
        b.push_back(static_cast<double>(2 + sample_L(u13, 0, 5, rng_b).value));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // discrete data: advance both samples past each tied value
    double ks = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() || ib < b.size()) {
        const double va = ia < a.size() ? a[ia] : std::numeric_limits<double>::infinity();
        const double vb = ib < b.size() ? b[ib] : std::numeric_limits<double>::infinity();
        const double v = std::min(va, vb);
        while (ia < a.size() && a[ia] == v) ++ia;
        while (ib < b.size() && b[ib] == v) ++ib;
        ks = std::max(ks, std::abs(static_cast<double>(ia) / static_cast<double>(a.size()) -
                                   static_cast<double>(ib) / static_cast<double>(b.size())));
    }
    // 1% two-sample threshold
    CHECK(ks <= 1.6276 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("moment bound ratios stay trendless") {
    std::vector<std::int64_t> grid;
    for (std::int64_t j = 1; j <= 60; ++j) grid.push_back(j);

    SUBCASE("Y = 1: ratio below one") {
        const auto rep = verify_moment_bound(RenewalLaw::constant(1), 2.0, grid);
        for (const double r : rep.ratios) CHECK(r < 1.0);
        CHECK_FALSE(rep.growth_detected);
    }
    SUBCASE("uniform{1,2}, p = 1 exact") {
        const auto rep = verify_moment_bound(RenewalLaw::uniform(1, 2), 1.0, grid);
        CHECK(rep.method == "exact-linear-system");
        CHECK_FALSE(rep.growth_detected);
        CHECK(rep.C_hat < 3.0);
    }
    SUBCASE("uniform{1,5}, p = 2 Monte Carlo") {
        const auto rep = verify_moment_bound(RenewalLaw::uniform(1, 5), 2.0, grid, 4000);
        CHECK_FALSE(rep.growth_detected);
    }
    SUBCASE("a genuine power-law violation is flagged") {
        // synthetic moments E ~ j^{p + 1/2} fed through the same fit
        std::vector<std::int64_t> jj;
        for (std::int64_t j = 1; j <= 60; ++j) jj.push_back(j);
        MomentBoundReport fake = verify_moment_bound(RenewalLaw::uniform(1, 2), 1.0, jj);
        // rebuild the ratios with injected growth and re-run the verdict logic
        bool detected;
        {
            std::vector<double> lx, ly;
            for (std::size_t i = jj.size() / 2; i < jj.size(); ++i) {
                lx.push_back(std::log(static_cast<double>(jj[i])));
                ly.push_back(std::log(fake.ratios[i] * std::sqrt(static_cast<double>(jj[i]))));
            }
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
            mx /= static_cast<double>(lx.size());
            my /= static_cast<double>(lx.size());
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
                sxx += (lx[i] - mx) * (lx[i] - mx);
                sxy += (lx[i] - mx) * (ly[i] - my);
            }
            const double slope = sxy / sxx;
            detected = slope > fake.approach_allowance;
        }
        CHECK(detected);
    }
}

TEST_CASE("zeta chain moments and absorption") {
    const auto u12 = RenewalLaw::uniform(1, 2);
    std::vector<std::int64_t> grid;
    for (std::int64_t x = 0; x <= 100; x += 5) grid.push_back(x);
    const auto ratios = zeta_moment_check(u12, 2.0, grid);
    CHECK(ratios[0] == 0.0);   // absorbed at zero
    for (const double r : ratios) CHECK(r <= 1.0);   // uniformly bounded

    const auto ones_ratios = zeta_moment_check(RenewalLaw::constant(1), 2.0, {1, 2, 3});
    for (const double r : ones_ratios) CHECK(r == 0.0);

    // once absorbed the chain stays at zero
    Rng rng(3);
    std::int64_t state = 5;
    while (state != 0) state = forward_recurrence(u12, state, rng);
    for (int step = 0; step < 4; ++step) {
        state = forward_recurrence(u12, state, rng);
        CHECK(state == 0);
    }
}

TEST_CASE("nu_0 geometric tails") {
    SUBCASE("Y = 1 absorbs in one step") {
        const auto rep = nu0_tail(RenewalLaw::constant(1), 4, {1, 2, 3}, 2000);
        for (const double s : rep.survival) CHECK(s == 0.0);
    }
    SUBCASE("uniform{1,2} from x = 1") {
        std::vector<std::int64_t> grid{1, 3, 5, 7, 9, 11, 13, 15};
        const auto rep = nu0_tail(RenewalLaw::uniform(1, 2), 1, grid, 400'000);
        CHECK(rep.log_slope < 0.0);
        CHECK(rep.log_slope + 4.0 * rep.log_slope_std_err < 0.0);
        // exact transient-chain powers agree within Monte Carlo error
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double exact = nu0_survival_exact(RenewalLaw::uniform(1, 2), 1, grid[i]);
            CHECK(std::abs(rep.survival[i] - exact) <= 4.0 * rep.std_errs[i] + 1e-12);
        }
    }
    SUBCASE("uniform{1,10} from x = 7") {
        const auto rep = nu0_tail(RenewalLaw::uniform(1, 10), 7, {2, 6, 10, 14, 18, 22, 26, 30},
                                  200'000);
        CHECK(rep.log_slope + 4.0 * rep.log_slope_std_err < 0.0);
    }
}

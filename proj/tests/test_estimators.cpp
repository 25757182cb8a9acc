#include <doctest.h>

#include <cmath>

#include "rwre/estimators.hpp"
#include "rwre/presets.hpp"

using namespace rwre;

TEST_CASE("velocity from blocks") {
    SUBCASE("deterministic walk is exact") {
        const auto sample = sample_blocks(preset_law("deterministic"), 500, 1);
        const auto est = velocity(sample.blocks);
        CHECK(est.v_hat[0] == doctest::Approx(1.0));
        CHECK(est.std_err[0] == doctest::Approx(0.0));
    }
    SUBCASE("lazy-nn hits 2/3") {
        const auto sample = sample_blocks(preset_law("lazy-nn"), 40'000, 2);
        const auto est = velocity(sample.blocks);
        CHECK(std::abs(est.v_hat[0] - 2.0 / 3.0) <= 4.0 * est.std_err[0]);
    }
    SUBCASE("one-two-jump hits 1.4") {
        const auto sample = sample_blocks(preset_law("one-two-jump"), 40'000, 3);
        const auto est = velocity(sample.blocks);
        CHECK(std::abs(est.v_hat[0] - 1.4) <= 4.0 * est.std_err[0]);
    }
}

TEST_CASE("annealed diffusion matrix") {
    SUBCASE("deterministic walk: zero matrix") {
        const auto sample = sample_blocks(preset_law("deterministic"), 500, 4);
        const auto rep = annealed_diffusion(sample.blocks, Vec::Constant(1, 1.0), true);
        CHECK(rep.d_hat(0, 0) == doctest::Approx(0.0));
    }
    SUBCASE("two-jump homogeneous walk: (a-b)(a-b)^t / 4") {
        const auto sample = sample_blocks(preset_law("two-jump-homogeneous"), 40'000, 5);
        Vec v(2);
        v << 0.5, 0.5;
        const auto rep = annealed_diffusion(sample.blocks, v, true);
        CHECK(std::abs(rep.d_hat(0, 0) - 0.25) <= 4.0 * rep.std_err(0, 0));
        CHECK(std::abs(rep.d_hat(0, 1) + 0.25) <= 4.0 * rep.std_err(0, 1));
        CHECK(std::abs(rep.d_hat(1, 0) + 0.25) <= 4.0 * rep.std_err(1, 0));
        CHECK(std::abs(rep.d_hat(1, 1) - 0.25) <= 4.0 * rep.std_err(1, 1));
        CHECK(rep.min_eigenvalue >= -1e-9);
    }
    SUBCASE("lazy-nn matches 10/27") {
        const auto sample = sample_blocks(preset_law("lazy-nn"), 60'000, 6);
        const auto rep = annealed_diffusion(sample.blocks, Vec::Constant(1, 2.0 / 3.0), true);
        CHECK(std::abs(rep.d_hat(0, 0) - 10.0 / 27.0) <= 4.0 * rep.std_err(0, 0));
    }
}

TEST_CASE("degeneracy subspaces by exact integer elimination") {
    SUBCASE("two-jump homogeneous") {
        const auto sub = degeneracy_subspace(preset_law("two-jump-homogeneous"));
        CHECK(sub.rank == 1);
        REQUIRE(sub.span_basis.size() == 1);
        // span { (1,0) - (0,1) } = (1,-1); complement is the (1,1) line
        CHECK(std::abs(sub.span_basis[0][0]) == 1);
        CHECK(sub.span_basis[0][0] == -sub.span_basis[0][1]);
        REQUIRE(sub.complement_basis.size() == 1);
        CHECK(sub.complement_basis[0][0] == sub.complement_basis[0][1]);
    }
    SUBCASE("single-jump law: everything degenerate") {
        const auto sub = degeneracy_subspace(preset_law("deterministic"));
        CHECK(sub.rank == 0);
        CHECK(sub.complement_basis.size() == 1);
    }
    SUBCASE("abscont: differences span the e2 axis only") {
        // jumps all share e1-component 1, so x - y is vertical and the
        // annealed walk is degenerate in direction e1 (X_n . e1 = n exactly)
        const auto sub = degeneracy_subspace(preset_law("abscont"));
        CHECK(sub.rank == 1);
        REQUIRE(sub.complement_basis.size() == 1);
        CHECK(sub.complement_basis[0][1] == 0);
        CHECK(std::abs(sub.complement_basis[0][0]) == 1);

        const auto sample = sample_blocks(preset_law("abscont"), 8000, 77);
        Vec v(2);
        v << 1.0, 0.0;   // every jump advances e1 by one and sigma_1 = 1
        const auto rep = annealed_diffusion(sample.blocks, v, true);
        const auto checks = verify_degeneracy(rep, sub);
        REQUIRE(checks.size() == 1);
        CHECK(checks[0].value == doctest::Approx(0.0));
    }
}

TEST_CASE("degenerate directions annihilate the estimated matrix") {
    const auto law = preset_law("two-jump-homogeneous");
    const auto sample = sample_blocks(law, 30'000, 7);
    Vec v(2);
    v << 0.5, 0.5;
    const auto rep = annealed_diffusion(sample.blocks, v, true);
    const auto checks = verify_degeneracy(rep, degeneracy_subspace(law));
    REQUIRE(checks.size() == 1);
    CHECK(std::abs(checks[0].value) <= checks[0].threshold);
}

TEST_CASE("kappa_m by the common-point representation") {
    SUBCASE("lazy-nn: every site is common, E(L) = 1") {
        const auto alt = kappa_m_alt(preset_law("lazy-nn"), 200, 11, 512);
        CHECK(alt.mean_L == doctest::Approx(1.0));
        CHECK(alt.value == doctest::Approx(2.0 / 27.0));
    }
    SUBCASE("one-two-jump agrees with the formula engine") {
        const auto alt = kappa_m_alt(preset_law("one-two-jump"), 3000, 12, 2048);
        const auto c = kappa_coeffs_formula(preset_law("one-two-jump"));
        CHECK(std::abs(alt.value - c.kappa_m_sq) <= 3.0 * alt.std_err + 1e-6);
    }
    SUBCASE("constant drift gives zero") {
        const auto alt = kappa_m_alt(preset_law("const-drift"), 200, 13, 512);
        CHECK(alt.value == doctest::Approx(0.0));
    }
}

TEST_CASE("invariant measure probabilities") {
    SUBCASE("full event estimates 1") {
        WindowEvent full;
        const auto est = pinfty_via_regeneration(preset_law("lazy-nn"), full, 20'000, 21);
        CHECK(std::abs(est.value - 1.0) <= 4.0 * est.std_err);
    }
    SUBCASE("single-site atom event matches the density identity") {
        const auto law = preset_law("lazy-nn");
        WindowEvent atom1;
        atom1.constraints.push_back({make_lattice({0}), 1});   // the lazy atom
        const double exact = pinfty_exact_site_event(law, 1);
        // density: (1/2 * 2) / 1.5 = 2/3
        CHECK(exact == doctest::Approx(2.0 / 3.0));
        const auto regen = pinfty_via_regeneration(law, atom1, 100'000, 22);
        CHECK(std::abs(regen.value - exact) <= 4.0 * regen.std_err);
        const auto limit = pinfty_via_limit(law, atom1, 200, 100'000, 23);
        CHECK(std::abs(limit.value - exact) <= 4.0 * limit.std_err);
        // the two estimators also agree with each other
        CHECK(std::abs(regen.value - limit.value) <=
              4.0 * std::sqrt(regen.std_err * regen.std_err + limit.std_err * limit.std_err));
    }
    SUBCASE("abscont event is never seen from the walk") {
        const auto law = preset_law("abscont");
        const auto ev = abscont_event();
        const auto regen = pinfty_via_regeneration(law, ev, 100'000, 24);
        CHECK(regen.hits == 0);
        for (const std::int64_t n : {1, 5, 20}) {
            const auto limit = pinfty_via_limit(law, ev, n, 100'000, 25);
            CHECK(limit.hits == 0);
        }
        // at n = 0 the event has its product probability
        const auto at0 = pinfty_via_limit(law, ev, 0, 200'000, 26);
        const double p = 1.0 / 27.0;
        CHECK(std::abs(at0.value - p) <= 4.0 * at0.std_err);
    }
}

TEST_CASE("method triangle for kappa_m^2 (formula / common-point / fluctuation)") {
    const auto law = preset_law("one-two-jump");
    const auto formula = kappa_coeffs_formula(law);
    const auto alt = kappa_m_alt(law, 4000, 91, 2048);
    const auto fluct = quenched_mean_fluctuation(law, 1200, 1200, 92);

    const double se_alt = alt.std_err;
    const double se_fl = fluct.variance_std_err;
    CHECK(std::abs(formula.kappa_m_sq - alt.value) <= 4.0 * se_alt + 1e-6);
    CHECK(std::abs(formula.kappa_m_sq - fluct.variance) <= 4.0 * se_fl + 2e-3);
    CHECK(std::abs(alt.value - fluct.variance) <=
          4.0 * std::sqrt(se_alt * se_alt + se_fl * se_fl) + 2e-3);
}

TEST_CASE("pinfty estimator battery agrees across methods") {
    const auto law = preset_law("one-two-jump");
    // single-site events and a two-site window event, all S_0-measurable
    std::vector<WindowEvent> events;
    for (std::int64_t atom = 0; atom < 2; ++atom) {
        WindowEvent ev;
        ev.constraints.push_back({make_lattice({0}), atom});
        events.push_back(ev);
    }
    WindowEvent pair;
    pair.constraints.push_back({make_lattice({0}), 0});
    pair.constraints.push_back({make_lattice({1}), 1});
    events.push_back(pair);

    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto regen = pinfty_via_regeneration(law, events[i], 60'000, 400 + i);
        const auto limit = pinfty_via_limit(law, events[i], 150, 60'000, 500 + i);
        const double se = std::sqrt(regen.std_err * regen.std_err + limit.std_err * limit.std_err);
        CHECK(std::abs(regen.value - limit.value) <= 4.0 * se);
    }
    // the single-site events also match the exact density arithmetic
    for (std::int64_t atom = 0; atom < 2; ++atom) {
        const auto regen = pinfty_via_regeneration(law, events[static_cast<std::size_t>(atom)],
                                                   60'000, 400 + static_cast<std::size_t>(atom));
        CHECK(std::abs(regen.value - pinfty_exact_site_event(law, atom)) <= 4.0 * regen.std_err);
    }
}

TEST_CASE("quenched mean fluctuation estimates kappa_m^2 and kappa_q^2") {
    const auto law = preset_law("lazy-nn");
    const auto sample = quenched_mean_fluctuation(law, 600, 600, 31);
    CHECK(std::abs(sample.variance - 2.0 / 27.0) <=
          4.0 * sample.variance_std_err + 0.01);
    CHECK(std::abs(sample.mean_var_rate - 8.0 / 27.0) <=
          4.0 * sample.mean_var_rate_std_err + 0.01);

    // degenerate law: quenched mean equals nv exactly, for every environment
    const auto degen = quenched_mean_fluctuation(preset_law("const-drift"), 400, 100, 32);
    for (const double c : degen.values) CHECK(std::abs(c) <= 1e-9);
}

TEST_CASE("restricted-path closed forms") {
    SUBCASE("deterministic walk") {
        const auto c = restricted_path_coefficients(preset_law("deterministic"));
        CHECK(c.kappa0_sq == doctest::Approx(0.0));
        CHECK(c.d_m.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        CHECK(c.identity_residual <= 1e-12);
    }
    SUBCASE("lazy-nn: kappa_0^2 v^2 equals kappa_q^2") {
        const auto c = restricted_path_coefficients(preset_law("lazy-nn"));
        CHECK(c.v[0] == doctest::Approx(2.0 / 3.0));
        CHECK(c.kappa0_sq == doctest::Approx(2.0 / 3.0));
        CHECK(std::abs(c.kappa0_sq * c.v[0] * c.v[0] - 8.0 / 27.0) <= 1e-12);
        CHECK(c.identity_residual <= 1e-12);
        // the lambda_1-block diffusion matrix coincides with the sigma_1-path
        // closed form when the unit threshold is reached in one jump
        CHECK(std::abs(c.d_total(0, 0) - 10.0 / 27.0) <= 1e-12);
        CHECK(std::abs(c.d_total(0, 0) - diffusion_exact_1d(preset_law("lazy-nn"))) <= 1e-12);
    }
    SUBCASE("2d restricted mixture") {
        SiteLaw law({{0.5, JumpDistribution({{make_lattice({0, 0}), 0.5}, {make_lattice({1, 0}), 0.5}})},
                     {0.5, JumpDistribution({{make_lattice({1, 1}), 1.0}})}});
        const EnvironmentLaw env_law(law, make_lattice({1, 0}));
        const auto c = restricted_path_coefficients(env_law);
        CHECK(c.identity_residual <= 1e-12);
        // E lambda = .5*2 + .5*1 = 1.5, E X = .5*(1,0) + .5*(1,1) = (1, .5)
        CHECK(c.v[0] == doctest::Approx(2.0 / 3.0));
        CHECK(c.v[1] == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("non-restricted law is rejected") {
        CHECK_THROWS(restricted_path_coefficients(preset_law("abscont")));
    }
}

TEST_CASE("p0 constant") {
    const double p0 = p0_constant();
    CHECK(std::abs(p0 - 7.06025) <= 1e-4);
    CHECK(p0 > 0.5 * (5.0 + std::sqrt(17.0)));
    // the defining cubic (2p-2)(5p-9) - p(p-3)(2p-3) vanishes at p0
    const double cubic = (2 * p0 - 2) * (5 * p0 - 9) - p0 * (p0 - 3) * (2 * p0 - 3);
    CHECK(std::abs(cubic) <= 1e-6);
}

TEST_CASE("quenched mean drift stays bounded") {
    SUBCASE("deterministic: identically zero") {
        const auto series = quenched_mean_drift_bound(preset_law("deterministic"),
                                                      {50, 100, 200}, 10, 41);
        for (const double d : series.deviation) CHECK(d <= 1e-9);
    }
    SUBCASE("lazy-nn: no linear growth") {
        const auto series = quenched_mean_drift_bound(preset_law("lazy-nn"),
                                                      {100, 200, 400, 800, 1600}, 800, 42);
        CHECK(std::abs(series.slope) <= 4.0 * series.slope_std_err + 1e-4);
    }
    SUBCASE("constant-drift law: exactly zero at every n") {
        const auto series = quenched_mean_drift_bound(preset_law("const-drift"),
                                                      {50, 100, 200}, 50, 43);
        for (const double d : series.deviation) CHECK(d <= 1e-9);
    }
}

// Experiment runner for ballistic random walks in random environments with a
// forbidden direction. Subcommands expose the library's simulators, exact
// computations and diagnostics with reproducible seeds and machine-readable
// JSON/CSV outputs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwre/estimators.hpp"
#include "rwre/exactq.hpp"
#include "rwre/kappa.hpp"
#include "rwre/law_json.hpp"
#include "rwre/presets.hpp"
#include "rwre/renewal.hpp"
#include "rwre/stats.hpp"

namespace {

using nlohmann::json;
using namespace rwre;

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    std::string law_file;
    std::string preset;
    std::uint64_t seed = 1;
    bool seed_set = false;
    int threads = 0;
    std::string out_file;
    std::string csv_file;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_law = true) {
    if (with_law) {
        cmd->add_option("--law", o.law_file, "law JSON file");
        cmd->add_option("--preset", o.preset, "named preset law");
    }
    cmd->add_option("--seed", o.seed, "master seed")->each([&o](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out", o.out_file, "JSON output path (default stdout)");
    cmd->add_option("--csv", o.csv_file, "CSV output path");
}

std::uint64_t effective_seed(const CommonOpts& o) {
    if (const char* env = std::getenv("RWRE_SEED")) {
        return static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    }
    return o.seed;
}

json load_law_json(const CommonOpts& o) {
    if (!o.preset.empty()) return json{{"preset", o.preset}};
    if (o.law_file.empty()) throw std::invalid_argument("provide --law FILE or --preset NAME");
    std::ifstream in(o.law_file);
    if (!in) throw std::invalid_argument("cannot open law file: " + o.law_file);
    json j;
    in >> j;
    return j;
}

std::uint64_t config_hash(const json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 0x636f6e666967ULL;
    for (const char c : dump) h = hash_combine(h, static_cast<std::uint64_t>(c));
    return h;
}

void emit(const CommonOpts& o, json report, const json& config) {
    report["config"] = config;
    report["config_hash"] = config_hash(config);
    report["version"] = kVersion;
    const std::string text = report.dump(2);
    if (o.out_file.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(o.out_file);
        out << text << "\n";
    }
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    if (path.empty()) return;
    std::ofstream out(path);
    out << header << "\r\n";
    for (const auto& r : rows) out << r << "\r\n";
}

json vec_to_json(const Vec& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

json mat_to_json(const Mat& m) {
    json j = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        j.push_back(row);
    }
    return j;
}

WindowEvent event_from_json(const json& j) {
    WindowEvent ev;
    ev.measurability_level = j.value("level", 0);
    for (const auto& c : j.at("constraints")) {
        Lattice site(static_cast<Eigen::Index>(c.at("site").size()));
        for (std::size_t i = 0; i < c.at("site").size(); ++i)
            site[static_cast<Eigen::Index>(i)] = c.at("site")[i].get<std::int64_t>();
        ev.constraints.push_back({site, c.at("atom").get<std::int64_t>()});
    }
    return ev;
}

// ---- examples subcommand: closed-form batteries, one per preset ------------

struct Battery {
    json checks = json::array();
    bool ok = true;

    void expect(const std::string& name, double got, double want, double tol) {
        const bool pass = std::abs(got - want) <= tol;
        ok = ok && pass;
        checks.push_back({{"check", name}, {"value", got}, {"target", want},
                          {"tolerance", tol}, {"pass", pass}});
    }
    void expect_true(const std::string& name, bool pass) {
        ok = ok && pass;
        checks.push_back({{"check", name}, {"pass", pass}});
    }
};

int run_examples(const std::string& name, std::uint64_t seed, int threads, Battery& b) {
    if (name == "lazy-nn" || name == "one-two-jump") {
        const auto law = preset_law(name);
        const bool lazy = name == "lazy-nn";
        const double v_t = lazy ? 2.0 / 3.0 : 1.4;
        const double km_t = lazy ? 2.0 / 27.0 : 0.03;
        const double kq_t = lazy ? 8.0 / 27.0 : 0.21;
        const double d_t = lazy ? 10.0 / 27.0 : 0.24;

        b.expect("velocity formula", exact_velocity_1d(law), v_t, 1e-10);
        const auto coeffs = kappa_coeffs_formula(law);
        b.expect("kappa_m^2 formula", coeffs.kappa_m_sq, km_t, 1e-10);
        b.expect("kappa_q^2 formula", coeffs.kappa_q_sq, kq_t, 1e-10);
        b.expect("diffusion formula", coeffs.diffusion, d_t, 1e-10);
        b.expect("decomposition", decomposition_residual(coeffs), 0.0, 1e-10);

        BlockSampleConfig cfg;
        cfg.n_threads = threads;
        const auto blocks = sample_blocks(law, 20000, seed, cfg);
        const auto vel = velocity(blocks.blocks);
        b.expect("velocity mc", vel.v_hat[0], v_t, 4.0 * vel.std_err[0]);
        const auto diff = annealed_diffusion(blocks.blocks, Vec::Constant(1, v_t), true);
        b.expect("diffusion mc", diff.d_hat(0, 0), d_t, 4.0 * diff.std_err(0, 0));
        return b.ok ? 0 : 3;
    }
    if (name == "abscont") {
        const auto law = preset_law(name);
        const auto ev = abscont_event();
        const auto hyp = check_hypothesis_E(law);
        b.expect_true("hypothesis E holds", hyp.hypothesis_E && hyp.span_dim == 2);
        double base_prob = ev.prob_under(law.site_law());
        b.expect("P(A) product formula", base_prob, 1.0 / 27.0, 1e-12);
        std::int64_t hits = 0;
        const std::int64_t reps = 200000;
        for (std::int64_t r = 0; r < reps; ++r) {
            Environment env(law, hash_combine(seed, static_cast<std::uint64_t>(r)));
            hits += event_holds(env, ev, Lattice::Zero(2)) ? 1 : 0;
        }
        const double phat = static_cast<double>(hits) / static_cast<double>(reps);
        const double se = std::sqrt((1.0 / 27.0) * (26.0 / 27.0) / static_cast<double>(reps));
        b.expect("P(A) frequency", phat, 1.0 / 27.0, 4.0 * se);
        const auto pn = pinfty_via_limit(law, ev, 5, 200000, seed, threads);
        b.expect("P_n(A) hits", static_cast<double>(pn.hits), 0.0, 0.5);
        return b.ok ? 0 : 3;
    }
    if (name == "si-infty") {
        const auto law = preset_law(name);
        const auto probe = sigma1_divergence_probe(law, {100, 1000, 10000}, 400000, seed, threads);
        b.expect_true("truncated means strictly increasing", probe.strictly_increasing);
        return b.ok ? 0 : 3;
    }
    if (name == "two-jump-homogeneous") {
        const auto law = preset_law(name);
        BlockSampleConfig cfg;
        cfg.n_threads = threads;
        const auto blocks = sample_blocks(law, 20000, seed, cfg);
        Vec v(2);
        v << 0.5, 0.5;
        const auto diff = annealed_diffusion(blocks.blocks, v, true);
        b.expect("D(0,0)", diff.d_hat(0, 0), 0.25, 4.0 * diff.std_err(0, 0));
        b.expect("D(0,1)", diff.d_hat(0, 1), -0.25, 4.0 * diff.std_err(0, 1));
        b.expect("D(1,1)", diff.d_hat(1, 1), 0.25, 4.0 * diff.std_err(1, 1));
        const auto sub = degeneracy_subspace(law);
        b.expect_true("complement is one line", sub.complement_basis.size() == 1);
        const auto checks = verify_degeneracy(diff, sub);
        for (const auto& c : checks)
            b.expect("degenerate direction quadratic form", c.value, 0.0, c.threshold);
        return b.ok ? 0 : 3;
    }
    if (name == "const-drift") {
        const auto law = preset_law(name);
        const auto diag = tightness_diagnostic(law, seed, {100, 200, 400, 800, 1600});
        b.expect_true("c_n stabilizes at 0", diag.stabilizes);
        const auto coeffs = kappa_coeffs_formula(law);
        b.expect("kappa_m^2 = 0", coeffs.kappa_m_sq, 0.0, 1e-12);
        return b.ok ? 0 : 3;
    }
    if (name == "deterministic") {
        const auto law = preset_law(name);
        b.expect("velocity", exact_velocity_1d(law), 1.0, 0.0);
        const auto coeffs = kappa_coeffs_formula(law);
        b.expect("kappa_m^2", coeffs.kappa_m_sq, 0.0, 1e-14);
        b.expect("kappa_q^2", coeffs.kappa_q_sq, 0.0, 1e-14);
        b.expect("diffusion", coeffs.diffusion, 0.0, 1e-14);
        return b.ok ? 0 : 3;
    }
    throw std::invalid_argument("unknown battery: " + name);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ballistic RWRE simulator and exact-computation toolkit"};
    app.require_subcommand(1);

    CommonOpts o;

    // validate ---------------------------------------------------------------
    auto* c_validate = app.add_subcommand("validate", "check a law against the model hypotheses");
    add_common(c_validate, o);

    // simulate ---------------------------------------------------------------
    auto* c_simulate = app.add_subcommand("simulate", "run one quenched walk");
    std::int64_t sim_n = 1000;
    std::uint64_t sim_walk_seed = 1;
    add_common(c_simulate, o);
    c_simulate->add_option("--n", sim_n, "steps");
    c_simulate->add_option("--walk-seed", sim_walk_seed, "walk stream seed");

    // blocks -----------------------------------------------------------------
    auto* c_blocks = app.add_subcommand("blocks", "sample annealed regeneration blocks");
    std::int64_t blk_count = 10000;
    add_common(c_blocks, o);
    c_blocks->add_option("--count", blk_count, "number of blocks");

    // velocity ---------------------------------------------------------------
    auto* c_velocity = app.add_subcommand("velocity", "LLN velocity from blocks");
    std::int64_t vel_count = 100000;
    add_common(c_velocity, o);
    c_velocity->add_option("--count", vel_count, "number of blocks");

    // diffusion --------------------------------------------------------------
    auto* c_diffusion = app.add_subcommand("diffusion", "annealed diffusion matrix from blocks");
    std::int64_t dif_count = 100000;
    bool dif_exact_v = false;
    add_common(c_diffusion, o);
    c_diffusion->add_option("--count", dif_count, "number of blocks");
    c_diffusion->add_flag("--exact-v", dif_exact_v, "use the exact 1d velocity for centering");

    // kappas -----------------------------------------------------------------
    auto* c_kappas = app.add_subcommand("kappas", "quenched/mean variance coefficients (d = 1)");
    double kap_tol = 1e-11;
    std::int64_t kap_alt_pairs = 0;
    add_common(c_kappas, o);
    c_kappas->add_option("--tol", kap_tol, "certified series tail tolerance");
    c_kappas->add_option("--alt-pairs", kap_alt_pairs,
                         "also run the common-point representation with this many walk pairs");

    // pinfty -----------------------------------------------------------------
    auto* c_pinfty = app.add_subcommand("pinfty", "invariant-measure probability of a window event");
    std::string ev_file, ev_preset, pin_method = "both";
    std::int64_t pin_n = 100, pin_reps = 100000;
    add_common(c_pinfty, o);
    c_pinfty->add_option("--event", ev_file, "event JSON file");
    c_pinfty->add_option("--event-preset", ev_preset, "named event (abscont)");
    c_pinfty->add_option("--method", pin_method, "regeneration | limit | both");
    c_pinfty->add_option("--n", pin_n, "n for the limit estimator");
    c_pinfty->add_option("--replicates", pin_reps, "replicates");

    // qmean ------------------------------------------------------------------
    auto* c_qmean = app.add_subcommand("qmean", "quenched-mean drift bound series");
    std::vector<std::int64_t> qm_grid{100, 200, 400, 800, 1600};
    std::int64_t qm_envs = 400;
    add_common(c_qmean, o);
    c_qmean->add_option("--n-grid", qm_grid, "grid of n values");
    c_qmean->add_option("--envs", qm_envs, "environments");

    // restricted -------------------------------------------------------------
    auto* c_restricted = app.add_subcommand("restricted", "restricted-path closed forms");
    add_common(c_restricted, o);

    // renewal ----------------------------------------------------------------
    auto* c_renewal = app.add_subcommand("renewal", "renewal moment-bound verification");
    std::int64_t ren_lo = 1, ren_hi = 2, ren_jmax = 200, ren_samples = 20000;
    double ren_p = 1.0;
    add_common(c_renewal, o, false);
    c_renewal->add_option("--uniform-lo", ren_lo, "Y uniform support lower end");
    c_renewal->add_option("--uniform-hi", ren_hi, "Y uniform support upper end");
    c_renewal->add_option("--p", ren_p, "moment order");
    c_renewal->add_option("--j-max", ren_jmax, "grid upper end");
    c_renewal->add_option("--samples", ren_samples, "MC samples per grid point (p > 1)");

    // diagnose ---------------------------------------------------------------
    auto* c_diagnose = app.add_subcommand("diagnose", "statistical diagnostics battery");
    std::int64_t diag_blocks = 10000, diag_n = 2000;
    add_common(c_diagnose, o);
    c_diagnose->add_option("--blocks", diag_blocks, "blocks for independence tests");
    c_diagnose->add_option("--n", diag_n, "horizon for tightness diagnostics");

    // p0 ---------------------------------------------------------------------
    auto* c_p0 = app.add_subcommand("p0", "print the moment threshold constant");
    add_common(c_p0, o, false);

    // examples ---------------------------------------------------------------
    auto* c_examples = app.add_subcommand("examples", "run a named closed-form battery");
    std::string ex_name;
    add_common(c_examples, o, false);
    c_examples->add_option("--name", ex_name, "battery name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const std::uint64_t seed = effective_seed(o);

        if (*c_validate) {
            const json config{{"law", load_law_json(o)}};
            json report;
            ParsedLaw parsed = [&] {
                if (!o.preset.empty() || config["law"].contains("preset") ||
                    config["law"].contains("family")) {
                    const auto law = law_from_json(config["law"]);
                    if (!law.is_finite()) {
                        // si-infty: forbidden direction holds, (N) fails by design
                        return ParsedLaw{law.truncate_si_infty(8).law, law.u_hat()};
                    }
                    return ParsedLaw{law.site_law(), law.u_hat()};
                }
                return parse_law_unchecked(config["law"]);
            }();
            const auto forb = validate_forbidden_direction(parsed.site_law, parsed.u_hat);
            const double delta = nonnestling_delta(parsed.site_law, parsed.u_hat);
            report["forbidden_direction_ok"] = forb.ok;
            report["violations"] = json::array();
            for (const auto& [atom, z] : forb.violations) {
                json v{{"atom", atom}, {"jump", json::array()}};
                for (Eigen::Index i = 0; i < z.size(); ++i) v["jump"].push_back(z[i]);
                report["violations"].push_back(v);
            }
            report["delta"] = delta;
            report["non_nestling_ok"] = delta > 0.0;
            const bool ok = forb.ok && delta > 0.0;
            if (ok) {
                EnvironmentLaw checked(parsed.site_law, parsed.u_hat);
                for (const double p : {1.0, 2.0, 4.0})
                    report["moment_M"][std::to_string(static_cast<int>(p))] =
                        moment_bound(checked, p);
            }
            report["ok"] = ok;
            emit(o, report, config);
            return ok ? 0 : 2;
        }

        if (*c_simulate) {
            const json config{{"law", load_law_json(o)}, {"n", sim_n},
                              {"seed", seed}, {"walk_seed", sim_walk_seed}};
            const auto law = law_from_json(config["law"]);
            Environment env(law, seed);
            const auto path = run_quenched(env, Lattice::Zero(law.dim()), sim_n, sim_walk_seed);
            const auto sigma = regeneration_times(path, law.u_hat(), 1.0);
            json report;
            report["final_position"] = json::array();
            const Lattice xn = path.position_at(path.length());
            for (Eigen::Index i = 0; i < xn.size(); ++i) report["final_position"].push_back(xn[i]);
            report["regenerations"] = sigma.size() - 1;
            emit(o, report, config);
            std::vector<std::string> rows;
            Lattice x = path.start;
            std::string header = "n";
            for (Eigen::Index i = 0; i < x.size(); ++i) header += ",x" + std::to_string(i);
            for (std::size_t s = 0; s < path.steps.size(); ++s) {
                x += path.steps[s];
                std::string row = std::to_string(s + 1);
                for (Eigen::Index i = 0; i < x.size(); ++i) row += "," + std::to_string(x[i]);
                rows.push_back(row);
            }
            write_csv(o.csv_file, header, rows);
            return 0;
        }

        if (*c_blocks) {
            const json config{{"law", load_law_json(o)}, {"count", blk_count}, {"seed", seed}};
            const auto law = law_from_json(config["law"]);
            BlockSampleConfig cfg;
            cfg.n_threads = o.threads;
            const auto sample = sample_blocks(law, blk_count, seed, cfg);
            json report;
            report["blocks"] = sample.blocks.size();
            report["replicates"] = sample.replicates;
            report["aborted_replicates"] = sample.aborted_replicates;
            emit(o, report, config);
            std::vector<std::string> rows;
            std::string header = "replicate,block_index,duration";
            for (Eigen::Index k = 0; k < law.dim(); ++k)
                header += ",displacement" + std::to_string(k);
            for (std::size_t i = 0; i < sample.blocks.size(); ++i) {
                std::string row = std::to_string(sample.replicate[i]) + "," + std::to_string(i) +
                                  "," + std::to_string(sample.blocks[i].duration);
                for (Eigen::Index k = 0; k < sample.blocks[i].displacement.size(); ++k)
                    row += "," + std::to_string(sample.blocks[i].displacement[k]);
                rows.push_back(row);
            }
            write_csv(o.csv_file, header, rows);
            return 0;
        }

        if (*c_velocity) {
            const json config{{"law", load_law_json(o)}, {"count", vel_count}, {"seed", seed}};
            const auto law = law_from_json(config["law"]);
            BlockSampleConfig cfg;
            cfg.n_threads = o.threads;
            const auto sample = sample_blocks(law, vel_count, seed, cfg);
            const auto est = velocity(sample.blocks);
            json report{{"quantity", "velocity"}, {"method", "mc-blocks"},
                        {"value", vec_to_json(est.v_hat)}, {"std_err", vec_to_json(est.std_err)},
                        {"n_samples", est.n_blocks}};
            if (law.dim() == 1) report["exact"] = exact_velocity_1d(law);
            emit(o, report, config);
            return 0;
        }

        if (*c_diffusion) {
            const json config{{"law", load_law_json(o)}, {"count", dif_count},
                              {"seed", seed}, {"exact_v", dif_exact_v}};
            const auto law = law_from_json(config["law"]);
            BlockSampleConfig cfg;
            cfg.n_threads = o.threads;
            const auto sample = sample_blocks(law, dif_count, seed, cfg);
            Vec v;
            bool exact = false;
            if (dif_exact_v && law.dim() == 1) {
                v = Vec::Constant(1, exact_velocity_1d(law));
                exact = true;
            } else {
                v = velocity(sample.blocks).v_hat;
            }
            const auto report_d = annealed_diffusion(sample.blocks, v, exact);
            const auto sub = degeneracy_subspace(law);
            json report{{"quantity", "diffusion_matrix"}, {"method", "mc-blocks"},
                        {"value", mat_to_json(report_d.d_hat)},
                        {"std_err", mat_to_json(report_d.std_err)},
                        {"n_samples", report_d.n_blocks},
                        {"min_eigenvalue", report_d.min_eigenvalue},
                        {"span_rank", sub.rank}};
            report["degeneracy_checks"] = json::array();
            for (const auto& c : verify_degeneracy(report_d, sub)) {
                json jc{{"direction", json::array()}, {"value", c.value}, {"threshold", c.threshold}};
                for (Eigen::Index i = 0; i < c.direction.size(); ++i)
                    jc["direction"].push_back(c.direction[i]);
                report["degeneracy_checks"].push_back(jc);
            }
            emit(o, report, config);
            return 0;
        }

        if (*c_kappas) {
            const json config{{"law", load_law_json(o)}, {"tol", kap_tol},
                              {"alt_pairs", kap_alt_pairs}, {"seed", seed}};
            const auto law = law_from_json(config["law"]);
            KappaTruncation trunc;
            trunc.tol = kap_tol;
            const auto coeffs = kappa_coeffs_formula(law, trunc);
            json report{{"quantity", "kappa_coefficients"}, {"method", coeffs.method},
                        {"kappa_m_sq", coeffs.kappa_m_sq}, {"kappa_q_sq", coeffs.kappa_q_sq},
                        {"diffusion", coeffs.diffusion},
                        {"decomposition_residual", decomposition_residual(coeffs)},
                        {"truncation",
                         {{"series_index", coeffs.series_index},
                          {"kappa_m_tail", coeffs.kappa_m_tail},
                          {"kappa_q_tail", coeffs.kappa_q_tail}}}};
            if (kap_alt_pairs > 0) {
                const auto alt = kappa_m_alt(law, kap_alt_pairs, seed, 4096, o.threads);
                report["kappa_m_sq_alt"] = {{"value", alt.value}, {"std_err", alt.std_err},
                                            {"mean_L", alt.mean_L},
                                            {"mean_L_std_err", alt.mean_L_std_err}};
            }
            emit(o, report, config);
            return 0;
        }

        if (*c_pinfty) {
            json ev_json;
            if (!ev_preset.empty()) {
                if (ev_preset != "abscont") throw std::invalid_argument("unknown event preset");
                ev_json = {{"preset", "abscont"}};
            } else {
                if (ev_file.empty()) throw std::invalid_argument("provide --event or --event-preset");
                std::ifstream in(ev_file);
                if (!in) throw std::invalid_argument("cannot open event file");
                in >> ev_json;
            }
            const json config{{"law", load_law_json(o)}, {"event", ev_json}, {"method", pin_method},
                              {"n", pin_n}, {"replicates", pin_reps}, {"seed", seed}};
            const auto law = law_from_json(config["law"]);
            const WindowEvent ev = ev_preset.empty() ? event_from_json(ev_json) : abscont_event();
            json report{{"quantity", "pinfty"}};
            report["estimates"] = json::array();
            if (pin_method == "regeneration" || pin_method == "both") {
                const auto est = pinfty_via_regeneration(law, ev, pin_reps, seed, o.threads);
                report["estimates"].push_back({{"method", "regeneration"}, {"value", est.value},
                                               {"std_err", est.std_err}, {"hits", est.hits},
                                               {"n_samples", est.replicates}});
            }
            if (pin_method == "limit" || pin_method == "both") {
                const auto est = pinfty_via_limit(law, ev, pin_n, pin_reps, seed, o.threads);
                report["estimates"].push_back({{"method", "limit"}, {"value", est.value},
                                               {"std_err", est.std_err}, {"hits", est.hits},
                                               {"n_samples", est.replicates}});
            }
            emit(o, report, config);
            return 0;
        }

        if (*c_qmean) {
            const json config{{"law", load_law_json(o)}, {"n_grid", qm_grid},
                              {"envs", qm_envs}, {"seed", seed}};
            const auto law = law_from_json(config["law"]);
            const auto series = quenched_mean_drift_bound(law, qm_grid, qm_envs, seed, o.threads);
            json report{{"quantity", "quenched_mean_drift"}, {"method", "exact-per-env-mc"},
                        {"slope", series.slope}, {"slope_std_err", series.slope_std_err}};
            report["series"] = json::array();
            std::vector<std::string> rows;
            for (std::size_t i = 0; i < series.n_grid.size(); ++i) {
                report["series"].push_back({{"n", series.n_grid[i]},
                                            {"deviation", series.deviation[i]},
                                            {"std_err", series.std_err[i]}});
                rows.push_back(std::to_string(series.n_grid[i]) + "," +
                               std::to_string(series.deviation[i]) + "," +
                               std::to_string(series.std_err[i]) + ",exact-per-env-mc");
            }
            emit(o, report, config);
            write_csv(o.csv_file, "n,estimate,std_err,method", rows);
            return 0;
        }

        if (*c_restricted) {
            const json config{{"law", load_law_json(o)}};
            const auto law = law_from_json(config["law"]);
            const auto coeffs = restricted_path_coefficients(law);
            json report{{"quantity", "restricted_path_coefficients"},
                        {"v", vec_to_json(coeffs.v)},
                        {"d_m", mat_to_json(coeffs.d_m)},
                        {"kappa0_sq", coeffs.kappa0_sq},
                        {"d_total", mat_to_json(coeffs.d_total)},
                        {"identity_residual", coeffs.identity_residual}};
            emit(o, report, config);
            return 0;
        }

        if (*c_renewal) {
            const json config{{"uniform", {ren_lo, ren_hi}}, {"p", ren_p},
                              {"j_max", ren_jmax}, {"samples", ren_samples}, {"seed", seed}};
            const RenewalLaw law = RenewalLaw::uniform(ren_lo, ren_hi);
            std::vector<std::int64_t> grid;
            for (std::int64_t j = 1; j <= ren_jmax; ++j) grid.push_back(j);
            const auto report_r = verify_moment_bound(law, ren_p, grid, ren_samples, seed);
            json report{{"quantity", "renewal_moment_bound"}, {"method", report_r.method},
                        {"C_hat", report_r.C_hat}, {"slope", report_r.slope},
                        {"slope_std_err", report_r.slope_std_err}};
            std::vector<std::string> rows;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                rows.push_back(std::to_string(grid[i]) + "," + std::to_string(report_r.moments[i]) +
                               "," + std::to_string(report_r.std_errs[i]) + "," + report_r.method);
            }
            emit(o, report, config);
            write_csv(o.csv_file, "j,estimate,std_err,method", rows);
            return 0;
        }

        if (*c_diagnose) {
            const json config{{"law", load_law_json(o)}, {"blocks", diag_blocks},
                              {"n", diag_n}, {"seed", seed}};
            const auto law = law_from_json(config["law"]);
            json verdicts = json::array();
            BlockSampleConfig cfg;
            cfg.n_threads = o.threads;
            const auto sample = sample_blocks(law, diag_blocks, seed, cfg);
            const auto indep = block_independence_test(sample.blocks);
            double max_acf = 0.0;
            for (const double r : indep.duration_autocorr) max_acf = std::max(max_acf, std::abs(r));
            for (const double r : indep.displacement_autocorr) max_acf = std::max(max_acf, std::abs(r));
            verdicts.push_back({{"test", "block_independence"}, {"statistic", max_acf},
                                {"threshold", indep.autocorr_threshold}, {"pass", indep.pass}});
            if (law.dim() == 1) {
                std::vector<std::int64_t> grid;
                for (std::int64_t n = diag_n / 8; n <= diag_n; n += diag_n / 8) grid.push_back(n);
                const auto tight = tightness_diagnostic(law, seed, grid);
                verdicts.push_back({{"test", "tightness_range"},
                                    {"statistic", tight.range_top_half},
                                    {"threshold", 4.0 * tight.floor},
                                    {"pass", !tight.stabilizes}});
            }
            json report{{"quantity", "diagnostics"}, {"verdicts", verdicts}};
            emit(o, report, config);
            return 0;
        }

        if (*c_p0) {
            const json config{{"quantity", "p0"}};
            const double p0 = p0_constant();
            json report{{"quantity", "p0"}, {"value", p0}};
            emit(o, report, config);
            return 0;
        }

        if (*c_examples) {
            const json config{{"battery", ex_name}, {"seed", seed}};
            Battery battery;
            const int rc = run_examples(ex_name, seed, o.threads, battery);
            json report{{"quantity", "battery"}, {"name", ex_name},
                        {"pass", battery.ok}, {"checks", battery.checks}};
            emit(o, report, config);
            return rc;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

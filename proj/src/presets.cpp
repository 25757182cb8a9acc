#include "rwre/presets.hpp"

#include <stdexcept>

namespace rwre {

namespace {

JumpDistribution jd1(std::initializer_list<std::pair<std::int64_t, double>> jumps) {
    std::vector<JumpDistribution::Atom> atoms;
    for (const auto& [z, p] : jumps) atoms.push_back({make_lattice({z}), p});
    return JumpDistribution(std::move(atoms));
}

JumpDistribution jd2(std::initializer_list<std::pair<std::pair<std::int64_t, std::int64_t>, double>> jumps) {
    std::vector<JumpDistribution::Atom> atoms;
    for (const auto& [z, p] : jumps) atoms.push_back({make_lattice({z.first, z.second}), p});
    return JumpDistribution(std::move(atoms));
}

} // namespace

EnvironmentLaw preset_law(const std::string& name) {
    if (name == "lazy-nn") {
        SiteLaw law({{0.5, jd1({{1, 1.0}})},
                     {0.5, jd1({{0, 0.5}, {1, 0.5}})}});
        return EnvironmentLaw(std::move(law), make_lattice({1}));
    }
    if (name == "one-two-jump") {
        SiteLaw law({{0.5, jd1({{1, 0.8}, {2, 0.2}})},
                     {0.5, jd1({{1, 0.4}, {2, 0.6}})}});
        return EnvironmentLaw(std::move(law), make_lattice({1}));
    }
    if (name == "abscont") {
        SiteLaw law({{1.0 / 3.0, jd2({{{1, 1}, 0.5}, {{1, -1}, 0.5}})},
                     {1.0 / 3.0, jd2({{{1, 1}, 0.5}, {{1, 0}, 0.5}})},
                     {1.0 / 3.0, jd2({{{1, -1}, 0.5}, {{1, 0}, 0.5}})}});
        return EnvironmentLaw(std::move(law), make_lattice({1, 0}));
    }
    if (name == "si-infty") {
        return EnvironmentLaw::si_infty_family();
    }
    if (name == "two-jump-homogeneous") {
        SiteLaw law({{1.0, jd2({{{1, 0}, 0.5}, {{0, 1}, 0.5}})}});
        return EnvironmentLaw(std::move(law), make_lattice({1, 1}));
    }
    if (name == "const-drift") {
        // two distinct atoms, both with drift 1/2
        SiteLaw law({{0.5, jd1({{0, 0.5}, {1, 0.5}})},
                     {0.5, jd1({{0, 0.75}, {2, 0.25}})}});
        return EnvironmentLaw(std::move(law), make_lattice({1}));
    }
    if (name == "deterministic") {
        SiteLaw law({{1.0, jd1({{1, 1.0}})}});
        return EnvironmentLaw(std::move(law), make_lattice({1}));
    }
    throw std::invalid_argument("unknown preset law: " + name);
}

std::vector<std::string> preset_names() {
    return {"lazy-nn",  "one-two-jump",         "abscont",     "si-infty",
            "two-jump-homogeneous", "const-drift", "deterministic"};
}

WindowEvent abscont_event() {
    WindowEvent ev;
    ev.measurability_level = 1;
    ev.constraints.push_back({make_lattice({-1, 0}), 0});    // p_1
    ev.constraints.push_back({make_lattice({-1, 1}), 1});    // p_2
    ev.constraints.push_back({make_lattice({-1, -1}), 2});   // p_3
    return ev;
}

} // namespace rwre

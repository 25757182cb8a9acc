#include "rwre/law_json.hpp"

#include <stdexcept>

#include "rwre/presets.hpp"

namespace rwre {

namespace {

Lattice lattice_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("law json: lattice vector must be a nonempty array");
    Lattice z(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) z[static_cast<Eigen::Index>(i)] = j[i].get<std::int64_t>();
    return z;
}

} // namespace

ParsedLaw parse_law_unchecked(const nlohmann::json& j) {
    const auto dim = j.at("dim").get<Eigen::Index>();
    ParsedLaw parsed{SiteLaw{}, lattice_from_json(j.at("u_hat"))};
    if (parsed.u_hat.size() != dim)
        throw std::invalid_argument("law json: u_hat dimension mismatch");

    std::vector<SiteLaw::Atom> atoms;
    for (const auto& atom : j.at("atoms")) {
        std::vector<JumpDistribution::Atom> jumps;
        for (const auto& jump : atom.at("jumps")) {
            const Lattice z = lattice_from_json(jump.at("z"));
            if (z.size() != dim) throw std::invalid_argument("law json: jump dimension mismatch");
            jumps.push_back({z, jump.at("p").get<double>()});
        }
        atoms.push_back({atom.at("weight").get<double>(), JumpDistribution(std::move(jumps))});
    }
    parsed.site_law = SiteLaw(std::move(atoms));
    return parsed;
}

EnvironmentLaw law_from_json(const nlohmann::json& j) {
    if (j.contains("preset")) return preset_law(j.at("preset").get<std::string>());
    if (j.contains("family")) {
        const auto family = j.at("family").get<std::string>();
        if (family == "si-infty-example") return EnvironmentLaw::si_infty_family();
        if (family == "lazy-nn") return preset_law("lazy-nn");
        throw std::invalid_argument("law json: unknown family " + family);
    }
    auto parsed = parse_law_unchecked(j);
    return EnvironmentLaw(std::move(parsed.site_law), std::move(parsed.u_hat));
}

EnvironmentLaw law_from_json_text(const std::string& text) {
    return law_from_json(nlohmann::json::parse(text));
}

nlohmann::json law_to_json(const EnvironmentLaw& law) {
    nlohmann::json j;
    if (!law.is_finite()) {
        j["family"] = "si-infty-example";
        return j;
    }
    j["dim"] = law.dim();
    j["u_hat"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < law.u_hat().size(); ++i) j["u_hat"].push_back(law.u_hat()[i]);
    j["atoms"] = nlohmann::json::array();
    for (const auto& atom : law.site_law().atoms()) {
        nlohmann::json ja;
        ja["weight"] = atom.weight;
        ja["jumps"] = nlohmann::json::array();
        for (const auto& jump : atom.jd.atoms()) {
            nlohmann::json jj;
            jj["z"] = nlohmann::json::array();
            for (Eigen::Index i = 0; i < jump.z.size(); ++i) jj["z"].push_back(jump.z[i]);
            jj["p"] = jump.p;
            ja["jumps"].push_back(jj);
        }
        j["atoms"].push_back(ja);
    }
    return j;
}

} // namespace rwre

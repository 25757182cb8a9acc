#ifndef RWRE_LAW_JSON_HPP
#define RWRE_LAW_JSON_HPP

#include <string>

#include <json.hpp>

#include "rwre/law.hpp"

namespace rwre {

// Law schema:
//   {"dim": d, "u_hat": [ints],
//    "atoms": [{"weight": w, "jumps": [{"z": [ints], "p": q}]}]}
// Parametric families: {"family": "si-infty-example"} or
// {"family": "lazy-nn"}; preset shorthand: {"preset": name}.
EnvironmentLaw law_from_json(const nlohmann::json& j);
EnvironmentLaw law_from_json_text(const std::string& text);

nlohmann::json law_to_json(const EnvironmentLaw& law);

// Raw pieces for validation before the EnvironmentLaw constructor runs its
// checks (the `validate` subcommand must report on rejected laws).
struct ParsedLaw {
    SiteLaw site_law;
    Lattice u_hat;
};
ParsedLaw parse_law_unchecked(const nlohmann::json& j);

} // namespace rwre

#endif

#include "rwre/environment.hpp"

#include <map>

namespace rwre {

double WindowEvent::prob_under(const SiteLaw& law) const {
    std::map<std::vector<std::int64_t>, std::int64_t> required;
    for (const auto& c : constraints) {
        std::vector<std::int64_t> key(c.site.data(), c.site.data() + c.site.size());
        auto [it, inserted] = required.emplace(std::move(key), c.atom_id);
        if (!inserted && it->second != c.atom_id) return 0.0;
    }
    double p = 1.0;
    for (const auto& entry : required) {
        const std::int64_t atom_id = entry.second;
        if (atom_id < 0 || static_cast<std::size_t>(atom_id) >= law.size()) return 0.0;
        p *= law.atoms()[static_cast<std::size_t>(atom_id)].weight;
    }
    return p;
}

} // namespace rwre

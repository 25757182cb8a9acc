#ifndef RWRE_ENVIRONMENT_HPP
#define RWRE_ENVIRONMENT_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "rwre/law.hpp"
#include "rwre/rng.hpp"

namespace rwre {

// A realized environment omega: a pure, seed-deterministic assignment of a
// jump distribution to every lattice site. Nothing is stored; the atom choice
// at a site is a counter-based function of (seed, site), so environments are
// lazy, unbounded, reproducible, and safe to share across threads.
class Environment {
public:
    Environment(EnvironmentLaw law, std::uint64_t seed)
        : law_(std::make_shared<EnvironmentLaw>(std::move(law))), seed_(seed) {}
    Environment(std::shared_ptr<const EnvironmentLaw> law, std::uint64_t seed)
        : law_(std::move(law)), seed_(seed) {}

    const EnvironmentLaw& law() const { return *law_; }
    std::uint64_t seed() const { return seed_; }
    Eigen::Index dim() const { return law_->dim(); }

    // Atom id at site x. For finite mixtures this indexes the site law's atom
    // list; for the si-infty family it encodes (index, type).
    std::int64_t site_atom_id(const Lattice& x) const {
        const std::uint64_t word = Prf(seed_)(kSiteTag, lattice_hash(x));
        if (law_->is_finite()) {
            return static_cast<std::int64_t>(law_->site_law().sample_index(to_unit(word)));
        }
        return law_->si_infty_sample_atom_id(word);
    }

    // omega_x. For finite laws this is a reference into the site law.
    const JumpDistribution& site_env(const Lattice& x) const {
        if (law_->is_finite()) {
            const auto id = static_cast<std::size_t>(site_atom_id(x));
            return law_->site_law().atoms()[id].jd;
        }
        scratch_ = law_->si_infty_atom(site_atom_id(x));
        return scratch_;
    }

    JumpDistribution site_env_copy(const Lattice& x) const {
        if (law_->is_finite()) return site_env(x);
        return law_->si_infty_atom(site_atom_id(x));
    }

private:
    static constexpr std::uint64_t kSiteTag = 0x736974655f656e76ULL;   // "site_env"

    std::shared_ptr<const EnvironmentLaw> law_;
    std::uint64_t seed_;
    // Only used on the parametric path, which is single-walker simulation.
    mutable JumpDistribution scratch_;
};

// A cylinder event on finitely many sites: every constrained site must
// realize the given atom. measurability_level k means the event is
// S_{-k}-measurable: all constrained sites x satisfy x . u_hat >= -k.
struct WindowEvent {
    struct Constraint {
        Lattice site;
        std::int64_t atom_id;
    };
    std::vector<Constraint> constraints;
    int measurability_level = 0;

    // Checks the stated measurability against a direction.
    bool measurable_at_level(const Lattice& u_hat) const {
        for (const auto& c : constraints) {
            if (dot(c.site, u_hat) < -static_cast<std::int64_t>(measurability_level)) return false;
        }
        return true;
    }

    // Product-measure probability of the event under the i.i.d. law
    // (contradictory constraints on one site give 0).
    double prob_under(const SiteLaw& law) const;
};

// 1{T_base omega in A}: every constraint, translated by base, must hold.
inline bool event_holds(const Environment& env, const WindowEvent& ev, const Lattice& base) {
    for (const auto& c : ev.constraints) {
        if (env.site_atom_id(base + c.site) != c.atom_id) return false;
    }
    return true;
}

} // namespace rwre

#endif

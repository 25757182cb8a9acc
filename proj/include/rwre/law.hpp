#ifndef RWRE_LAW_HPP
#define RWRE_LAW_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwre/lattice.hpp"

namespace rwre {

inline constexpr double kProbTol = 1e-12;

// One site's finitely supported jump law. Atoms are kept sorted
// lexicographically by jump so inverse-CDF sampling is canonical.
class JumpDistribution {
public:
    struct Atom {
        Lattice z;
        double p;
    };

    JumpDistribution() = default;
    // Validates: p >= 0, no duplicate jumps, total mass within kProbTol of 1.
    explicit JumpDistribution(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    Eigen::Index dim() const { return atoms_.empty() ? 0 : atoms_.front().z.size(); }

    double prob_of(const Lattice& z) const;
    double holding_prob() const;                   // pi_{00}
    Vec drift() const;                             // sum_z z pi_{0z}
    double moment(double p) const;                 // sum_z |z|^p pi_{0z}
    std::int64_t max_abs_jump() const;             // max l1 norm over support

    // Inverse-CDF sample from a uniform in [0,1).
    const Lattice& sample(double u) const;

private:
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
};

// Finite mixture of jump distributions: the i.i.d. marginal of the
// environment measure at one site.
class SiteLaw {
public:
    struct Atom {
        double weight;
        JumpDistribution jd;
    };

    SiteLaw() = default;
    explicit SiteLaw(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    Eigen::Index dim() const { return atoms_.front().jd.dim(); }

    std::size_t sample_index(double u) const;

    // E[f(jd)] over the mixture.
    template <class F>
    double mean(F&& f) const {
        double s = 0.0;
        for (const auto& a : atoms_) s += a.weight * f(a.jd);
        return s;
    }

private:
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
};

enum class LawFamily { finite, si_infty };

// Environment law: the site marginal plus the direction u_hat and derived
// constants. Construction rejects laws that violate the forbidden-direction
// condition, and (for finite mixtures) laws with zero non-nestling margin.
// The si-infty family is the designated counterexample with E_0(sigma_1)
// infinite; it deliberately has inf drift = 0 and is admitted for
// simulation-only use.
class EnvironmentLaw {
public:
    EnvironmentLaw(SiteLaw site_law, Lattice u_hat);

    static EnvironmentLaw si_infty_family();

    const SiteLaw& site_law() const;
    const Lattice& u_hat() const { return u_hat_; }
    Eigen::Index dim() const { return dim_; }
    LawFamily family() const { return family_; }
    bool is_finite() const { return family_ == LawFamily::finite; }

    double delta() const { return delta_; }        // non-nestling margin
    double moment_M(double p) const;               // Hypothesis (M) constant
    std::int64_t max_abs_jump() const;

    // For the si-infty family: the finite mixture truncated at index i_max,
    // with the discarded tail mass reported.
    struct Truncated {
        SiteLaw law;
        double tail_mass;
    };
    Truncated truncate_si_infty(int i_max) const;

    // Parametric atom realization for si-infty; atom ids encode (index, type).
    JumpDistribution si_infty_atom(std::int64_t atom_id) const;
    std::int64_t si_infty_sample_atom_id(std::uint64_t word) const;

private:
    EnvironmentLaw() = default;

    SiteLaw site_law_;
    Lattice u_hat_;
    Eigen::Index dim_ = 0;
    LawFamily family_ = LawFamily::finite;
    double delta_ = 0.0;
};

// ---- Hypothesis checks -----------------------------------------------------

struct ForbiddenReport {
    bool ok = true;
    // (atom index, offending jump) pairs with z . u_hat < 0
    std::vector<std::pair<std::size_t, Lattice>> violations;
};

// Checks that every support point satisfies z . u_hat >= 0. Works on raw
// (site_law, u_hat) pairs so rejected inputs can still be reported.
ForbiddenReport validate_forbidden_direction(const SiteLaw& site_law, const Lattice& u_hat);
ForbiddenReport validate_forbidden_direction(const EnvironmentLaw& law);

// min over atoms of sum_z (z . u_hat) pi_{0z}; Hypothesis (N) holds iff > 0.
double nonnestling_delta(const SiteLaw& site_law, const Lattice& u_hat);
double nonnestling_delta(const EnvironmentLaw& law);

// max over atoms of (sum_z |z|^p pi_{0z})^{1/p}.
double moment_bound(const EnvironmentLaw& law, double p);

struct HypothesisEReport {
    bool restricted_path = false;   // every atom has pi_00 + pi_0z = 1 for one z != 0
    int span_dim = 0;               // dim of the linear span of J
    std::vector<Lattice> J;         // one-jump reachable points (positive mean mass)
    bool hypothesis_E = false;
};

HypothesisEReport check_hypothesis_E(const EnvironmentLaw& law);

// Exact one-dimensional velocity for finite laws:
// v = E[D/(1-pi_00)] / E[1/(1-pi_00)]  (= E_0(X_{sigma_1}) / E_0(sigma_1)).
double exact_velocity_1d(const EnvironmentLaw& law);

// Largest lambda with M^p lambda^p <= lambda delta / 2, the operative range of
// the exponential bound.
double lambda0(const EnvironmentLaw& law, double p);

} // namespace rwre

#endif

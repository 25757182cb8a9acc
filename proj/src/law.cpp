#include "rwre/law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwre/intlinalg.hpp"

namespace rwre {

JumpDistribution::JumpDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("JumpDistribution: empty support");
    const Eigen::Index d = atoms_.front().z.size();
    for (const auto& a : atoms_) {
        if (a.z.size() != d) throw std::invalid_argument("JumpDistribution: mixed dimensions");
        if (!(a.p >= 0.0)) throw std::invalid_argument("JumpDistribution: negative probability");
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return lattice_less(a.z, b.z); });
    for (std::size_t i = 1; i < atoms_.size(); ++i) {
        if (lattice_eq(atoms_[i - 1].z, atoms_[i].z))
            throw std::invalid_argument("JumpDistribution: duplicate jump");
    }
    double total = 0.0;
    cumulative_.reserve(atoms_.size());
    for (const auto& a : atoms_) {
        total += a.p;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw std::invalid_argument("JumpDistribution: mass not normalized");
}

double JumpDistribution::prob_of(const Lattice& z) const {
    for (const auto& a : atoms_) {
        if (lattice_eq(a.z, z)) return a.p;
    }
    return 0.0;
}

double JumpDistribution::holding_prob() const {
    for (const auto& a : atoms_) {
        if (a.z.isZero()) return a.p;
    }
    return 0.0;
}

Vec JumpDistribution::drift() const {
    Vec d = Vec::Zero(dim());
    for (const auto& a : atoms_) d += a.p * to_real(a.z);
    return d;
}

double JumpDistribution::moment(double p) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        const auto n = l1_norm(a.z);
        if (n > 0) s += a.p * std::pow(static_cast<double>(n), p);
    }
    return s;
}

std::int64_t JumpDistribution::max_abs_jump() const {
    std::int64_t m = 0;
    for (const auto& a : atoms_) m = std::max(m, l1_norm(a.z));
    return m;
}

const Lattice& JumpDistribution::sample(double u) const {
    const double target = u * cumulative_.back();
    std::size_t lo = 0, hi = cumulative_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (target < cumulative_[mid]) hi = mid; else lo = mid + 1;
    }
    return atoms_[lo].z;
}

SiteLaw::SiteLaw(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("SiteLaw: empty mixture");
    const Eigen::Index d = atoms_.front().jd.dim();
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.weight >= 0.0)) throw std::invalid_argument("SiteLaw: negative weight");
        if (a.jd.dim() != d) throw std::invalid_argument("SiteLaw: mixed dimensions");
        total += a.weight;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw std::invalid_argument("SiteLaw: weights not normalized");
}

std::size_t SiteLaw::sample_index(double u) const {
    const double target = u * cumulative_.back();
    std::size_t lo = 0, hi = cumulative_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (target < cumulative_[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
}

EnvironmentLaw::EnvironmentLaw(SiteLaw site_law, Lattice u_hat)
    : site_law_(std::move(site_law)), u_hat_(std::move(u_hat)) {
    dim_ = site_law_.dim();
    if (u_hat_.size() != dim_) throw std::invalid_argument("EnvironmentLaw: u_hat dimension mismatch");
    if (u_hat_.isZero()) throw std::invalid_argument("EnvironmentLaw: u_hat must be nonzero");
    const auto report = validate_forbidden_direction(site_law_, u_hat_);
    if (!report.ok)
        throw std::invalid_argument("EnvironmentLaw: forbidden-direction condition violated");
    delta_ = nonnestling_delta(site_law_, u_hat_);
    if (!(delta_ > 0.0))
        throw std::invalid_argument("EnvironmentLaw: non-nestling hypothesis fails (delta = 0)");
}

EnvironmentLaw EnvironmentLaw::si_infty_family() {
    EnvironmentLaw law;
    law.family_ = LawFamily::si_infty;
    law.dim_ = 2;
    law.u_hat_ = make_lattice({1, 0});
    law.delta_ = 0.0;   // inf over the countable mixture; hypothesis (N) fails
    return law;
}

const SiteLaw& EnvironmentLaw::site_law() const {
    if (!is_finite())
        throw std::logic_error("EnvironmentLaw: parametric family has no finite site law");
    return site_law_;
}

double EnvironmentLaw::moment_M(double p) const { return moment_bound(*this, p); }

std::int64_t EnvironmentLaw::max_abs_jump() const {
    if (!is_finite()) return 1;    // si-infty jumps are unit steps
    std::int64_t m = 0;
    for (const auto& a : site_law_.atoms()) m = std::max(m, a.jd.max_abs_jump());
    return m;
}

namespace {

double si_alpha(int i) { return 1.0 - std::ldexp(1.0, -2 * i); }

JumpDistribution si_atom(int i, bool type_q) {
    const double alpha = si_alpha(i);
    std::vector<JumpDistribution::Atom> atoms;
    atoms.push_back({make_lattice({1, 0}), 1.0 - alpha});
    atoms.push_back({make_lattice({0, type_q ? -1 : 1}), alpha});
    return JumpDistribution(std::move(atoms));
}

} // namespace

EnvironmentLaw::Truncated EnvironmentLaw::truncate_si_infty(int i_max) const {
    if (family_ != LawFamily::si_infty)
        throw std::logic_error("truncate_si_infty: not the si-infty family");
    if (i_max < 1) throw std::invalid_argument("truncate_si_infty: i_max >= 1 required");
    // P(p_i) = P(q_i) = 2^{-(i+1)}; retained mass renormalized, tail reported.
    std::vector<SiteLaw::Atom> atoms;
    double kept = 0.0;
    for (int i = 1; i <= i_max; ++i) {
        const double w = std::ldexp(1.0, -(i + 1));
        atoms.push_back({w, si_atom(i, false)});
        atoms.push_back({w, si_atom(i, true)});
        kept += 2.0 * w;
    }
    for (auto& a : atoms) a.weight /= kept;
    return Truncated{SiteLaw(std::move(atoms)), 1.0 - kept};
}

JumpDistribution EnvironmentLaw::si_infty_atom(std::int64_t atom_id) const {
    const bool type_q = (atom_id & 1) != 0;
    const int i = static_cast<int>(atom_id >> 1);
    return si_atom(i, type_q);
}

std::int64_t EnvironmentLaw::si_infty_sample_atom_id(std::uint64_t word) const {
    // index i >= 1 with P(i) = 2^{-i} via the leading run of the top bits,
    // type from the low bit; both exact and branch-free of floating point.
    int i = 1;
    std::uint64_t w = word >> 1;
    for (int b = 62; b >= 0 && ((w >> b) & 1) == 0; --b) ++i;
    if (i > 60) i = 60;
    return (static_cast<std::int64_t>(i) << 1) | static_cast<std::int64_t>(word & 1);
}

ForbiddenReport validate_forbidden_direction(const SiteLaw& site_law, const Lattice& u_hat) {
    ForbiddenReport report;
    for (std::size_t ai = 0; ai < site_law.atoms().size(); ++ai) {
        const auto& atom = site_law.atoms()[ai];
        if (atom.weight <= 0.0) continue;
        for (const auto& jump : atom.jd.atoms()) {
            if (jump.p > 0.0 && dot(jump.z, u_hat) < 0) {
                report.ok = false;
                report.violations.emplace_back(ai, jump.z);
            }
        }
    }
    return report;
}

ForbiddenReport validate_forbidden_direction(const EnvironmentLaw& law) {
    if (!law.is_finite()) return ForbiddenReport{};   // si-infty: all jumps have z.e1 >= 0
    return validate_forbidden_direction(law.site_law(), law.u_hat());
}

double nonnestling_delta(const SiteLaw& site_law, const Lattice& u_hat) {
    double delta = std::numeric_limits<double>::infinity();
    const Vec u = to_real(u_hat);
    for (const auto& atom : site_law.atoms()) {
        if (atom.weight <= 0.0) continue;
        delta = std::min(delta, atom.jd.drift().dot(u));
    }
    return delta;
}

double nonnestling_delta(const EnvironmentLaw& law) {
    if (!law.is_finite()) return 0.0;
    return nonnestling_delta(law.site_law(), law.u_hat());
}

double moment_bound(const EnvironmentLaw& law, double p) {
    if (p < 1.0) throw std::invalid_argument("moment_bound: p >= 1 required");
    if (!law.is_finite()) return 1.0;   // unit jumps
    double m = 0.0;
    for (const auto& atom : law.site_law().atoms()) {
        if (atom.weight <= 0.0) continue;
        m = std::max(m, atom.jd.moment(p));
    }
    return std::pow(m, 1.0 / p);
}

HypothesisEReport check_hypothesis_E(const EnvironmentLaw& law) {
    HypothesisEReport report;
    const auto& atoms = law.site_law().atoms();

    bool all_restricted = true;
    bool some_open = false;   // positive mass on atoms with pi_00 + pi_0z < 1 for all z
    for (const auto& atom : atoms) {
        if (atom.weight <= 0.0) continue;
        const double hold = atom.jd.holding_prob();
        bool restricted = false;
        for (const auto& jump : atom.jd.atoms()) {
            if (jump.z.isZero() || jump.p <= 0.0) continue;
            if (std::abs(hold + jump.p - 1.0) <= kProbTol) restricted = true;
        }
        if (!restricted) {
            all_restricted = false;
            some_open = true;
        }
    }
    report.restricted_path = all_restricted;

    std::vector<Lattice> J;
    for (const auto& atom : atoms) {
        if (atom.weight <= 0.0) continue;
        for (const auto& jump : atom.jd.atoms()) {
            if (jump.p <= 0.0 || jump.z.isZero()) continue;
            bool seen = false;
            for (const auto& y : J) seen = seen || lattice_eq(y, jump.z);
            if (!seen) J.push_back(jump.z);
        }
    }
    report.span_dim = int_row_echelon(J, law.dim()).rank;
    report.J = std::move(J);
    report.hypothesis_E = some_open && report.span_dim >= 2;
    return report;
}

double exact_velocity_1d(const EnvironmentLaw& law) {
    if (law.dim() != 1) throw std::invalid_argument("exact_velocity_1d: d = 1 required");
    double num = 0.0, den = 0.0;
    for (const auto& atom : law.site_law().atoms()) {
        const double hold = atom.jd.holding_prob();
        const double esc = 1.0 - hold;
        if (!(esc > 0.0)) throw std::invalid_argument("exact_velocity_1d: absorbing atom");
        num += atom.weight * atom.jd.drift()[0] / esc;
        den += atom.weight / esc;
    }
    return num / den;
}

double lambda0(const EnvironmentLaw& law, double p) {
    // M^p l^p = l delta/2  =>  l = (delta / (2 M^p))^{1/(p-1)}
    const double M = law.moment_M(p);
    const double d = law.delta();
    if (!(d > 0.0)) return 0.0;
    return std::pow(d / (2.0 * std::pow(M, p)), 1.0 / (p - 1.0));
}

} // namespace rwre

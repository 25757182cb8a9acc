#include "rwre/pairchain.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace rwre {

std::vector<double> embedded_jump_probs(const JumpDistribution& jd, std::int64_t max_jump) {
    std::vector<double> probs(static_cast<std::size_t>(max_jump) + 1, 0.0);
    const double esc = 1.0 - jd.holding_prob();
    if (!(esc > 0.0)) throw std::invalid_argument("embedded_jump_probs: absorbing site");
    for (const auto& a : jd.atoms()) {
        if (a.z[0] > 0) probs[static_cast<std::size_t>(a.z[0])] = a.p / esc;
    }
    return probs;
}

namespace {

// State (dA, dB): distance from the scan position to each walker's next range
// point. Encoded dA * width + dB.
struct ScanState {
    std::int64_t width;             // D + 1
    std::vector<double> mass;

    explicit ScanState(std::int64_t D) : width(D + 1) {
        mass.assign(static_cast<std::size_t>(width * width), 0.0);
    }
    double& at(std::int64_t a, std::int64_t b) {
        return mass[static_cast<std::size_t>(a * width + b)];
    }
};

// One scan step: walkers sitting on the current site jump with the given
// embedded law; the others move one site closer. States never grow past
// max_jump - 1 after their first jump.
void jump_step(ScanState& cur, ScanState& next, const std::vector<double>& probs,
               std::int64_t max_jump) {
    std::fill(next.mass.begin(), next.mass.end(), 0.0);
    const std::int64_t D = cur.width - 1;
    for (std::int64_t a = 0; a <= D; ++a) {
        for (std::int64_t b = 0; b <= D; ++b) {
            const double m = cur.at(a, b);
            if (m <= 0.0) continue;
            if (a == 0 && b == 0)
                throw std::logic_error("pair chain: unabsorbed (0,0) state");
            if (a == 0) {
                for (std::int64_t j = 1; j <= max_jump; ++j) {
                    const double p = probs[static_cast<std::size_t>(j)];
                    if (p > 0.0) next.at(j - 1, b - 1) += m * p;
                }
            } else if (b == 0) {
                for (std::int64_t j = 1; j <= max_jump; ++j) {
                    const double p = probs[static_cast<std::size_t>(j)];
                    if (p > 0.0) next.at(a - 1, j - 1) += m * p;
                }
            } else {
                next.at(a - 1, b - 1) += m;
            }
        }
    }
}

// Worst-case-over-atoms continuation certificate on the post-horizon state
// space [0, R-1]^2. ||W_t|| = sup over transient states of the largest
// survival probability any atom assignment can achieve over t more sites.
double continuation_certificate(const std::vector<std::vector<double>>& atom_probs,
                                std::int64_t max_jump, bool* certified) {
    const std::int64_t D = std::max<std::int64_t>(max_jump - 1, 1);
    const std::int64_t width = D + 1;
    const auto idx = [width](std::int64_t a, std::int64_t b) {
        return static_cast<std::size_t>(a * width + b);
    };
    std::vector<double> w(static_cast<std::size_t>(width * width), 1.0);
    w[idx(0, 0)] = 0.0;

    auto step = [&](const std::vector<double>& in) {
        std::vector<double> out(in.size(), 0.0);
        for (std::int64_t a = 0; a <= D; ++a) {
            for (std::int64_t b = 0; b <= D; ++b) {
                if (a == 0 && b == 0) continue;
                double best = 0.0;
                if (a >= 1 && b >= 1) {
                    best = in[idx(a - 1, b - 1)];
                } else {
                    const std::int64_t other = (a == 0) ? b : a;
                    for (const auto& probs : atom_probs) {
                        double s = 0.0;
                        for (std::int64_t j = 1; j <= max_jump; ++j) {
                            const double p = probs[static_cast<std::size_t>(j)];
                            if (p <= 0.0) continue;
                            const std::int64_t na = (a == 0) ? j - 1 : a - 1;
                            const std::int64_t nb = (a == 0) ? other - 1 : j - 1;
                            if (na == 0 && nb == 0) continue;   // absorbed
                            s += p * in[idx(std::min(na, D), std::min(nb, D))];
                        }
                        best = std::max(best, s);
                    }
                }
                out[idx(a, b)] = best;
            }
        }
        return out;
    };

    const std::int64_t t_cap = 64 * std::max<std::int64_t>(max_jump, 2);
    double partial = 0.0;
    double norm = 1.0;
    std::int64_t t = 0;
    while (t < t_cap) {
        w = step(w);
        ++t;
        norm = 0.0;
        for (double v : w) norm = std::max(norm, v);
        partial += norm;
        if (norm < 0.5) break;
    }
    if (norm >= 1.0 - 1e-12) {
        *certified = false;
        return std::numeric_limits<double>::infinity();
    }
    *certified = true;
    // sum_{t>=1} ||W_t|| <= partial / (1 - ||W_T||) by submultiplicativity
    return partial / (1.0 - norm);
}

// cert_probs: the transition laws the beyond-horizon certificate ranges over.
// Quenched tails must survive the worst atom assignment; annealed tails see
// the averaged chain only. Requires horizon >= offset so the certificate's
// state space [0, R-1]^2 covers every reachable post-horizon state.
PairChainResult run_scan(std::int64_t offset, std::int64_t horizon, std::int64_t max_jump,
                         const std::vector<std::vector<double>>& cert_probs,
                         const std::function<const std::vector<double>&(std::int64_t)>& site_probs) {
    if (offset < 1) throw std::invalid_argument("pair chain: offset >= 1 required");
    const std::int64_t D = std::max(offset, max_jump - 1);
    ScanState cur(D), next(D);
    cur.at(0, offset) = 1.0;

    PairChainResult out;
    out.survival.assign(static_cast<std::size_t>(horizon) + 1, 1.0);

    double absorbed = 0.0;
    jump_step(cur, next, site_probs(0), max_jump);
    cur.mass.swap(next.mass);
    for (std::int64_t s = 1; s <= horizon; ++s) {
        absorbed += cur.at(0, 0);
        cur.at(0, 0) = 0.0;
        out.survival[static_cast<std::size_t>(s)] = std::max(0.0, 1.0 - absorbed);
        if (s < horizon) {
            jump_step(cur, next, site_probs(s), max_jump);
            cur.mass.swap(next.mass);
        }
    }
    out.continuation_sum = continuation_certificate(cert_probs, max_jump, &out.certified);
    return out;
}

} // namespace

PairChainResult quenched_pair_survival(const Environment& env, std::int64_t base,
                                       std::int64_t offset, std::int64_t horizon) {
    if (env.dim() != 1) throw std::invalid_argument("quenched_pair_survival: d = 1 required");
    const auto& law = env.law();
    const std::int64_t R = law.max_abs_jump();

    std::vector<std::vector<double>> atom_probs;
    for (const auto& a : law.site_law().atoms())
        atom_probs.push_back(embedded_jump_probs(a.jd, R));

    std::vector<std::vector<double>> site_cache(static_cast<std::size_t>(horizon));
    std::vector<double> scratch;
    auto site_probs = [&](std::int64_t s) -> const std::vector<double>& {
        if (s < horizon) {
            auto& slot = site_cache[static_cast<std::size_t>(s)];
            if (slot.empty()) {
                Lattice x(1);
                x[0] = base + s;
                slot = embedded_jump_probs(env.site_env(x), R);
            }
            return slot;
        }
        Lattice x(1);
        x[0] = base + s;
        scratch = embedded_jump_probs(env.site_env(x), R);
        return scratch;
    };
    return run_scan(offset, horizon, R, atom_probs, site_probs);
}

PairChainResult annealed_pair_survival(const EnvironmentLaw& law, std::int64_t offset,
                                       std::int64_t horizon) {
    if (law.dim() != 1) throw std::invalid_argument("annealed_pair_survival: d = 1 required");
    const std::int64_t R = law.max_abs_jump();

    std::vector<double> averaged(static_cast<std::size_t>(R) + 1, 0.0);
    for (const auto& a : law.site_law().atoms()) {
        const auto probs = embedded_jump_probs(a.jd, R);
        for (std::size_t j = 0; j < probs.size(); ++j) averaged[j] += a.weight * probs[j];
    }
    auto site_probs = [&](std::int64_t) -> const std::vector<double>& { return averaged; };
    return run_scan(offset, horizon, R, {averaged}, site_probs);
}

double survival_tail_sum(const PairChainResult& r, std::int64_t from) {
    const auto horizon = static_cast<std::int64_t>(r.survival.size()) - 1;
    double s = 0.0;
    for (std::int64_t k = from + 1; k <= horizon; ++k)
        s += r.survival[static_cast<std::size_t>(k)];
    const double last = r.survival[static_cast<std::size_t>(horizon)];
    if (last > 0.0) s += last * r.continuation_sum;   // infinity when uncertified
    return s;
}

} // namespace rwre

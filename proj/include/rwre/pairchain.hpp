#ifndef RWRE_PAIRCHAIN_HPP
#define RWRE_PAIRCHAIN_HPP

#include <cstdint>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

// First-meeting analysis for two independent monotone walks in the same
// one-dimensional environment. L is the first site >= base + 1 common to both
// ranges. The scan processes one lattice site at a time; before the walks
// meet, at most one of them consumes any given site, which is what makes the
// annealed variant a product over sites.
struct PairChainResult {
    // survival[s] = P(L > base + s), s = 0..horizon (survival[0] = 1)
    std::vector<double> survival;
    // certified bound on sum_{t >= 1} sup_state P(survive t more sites);
    // multiplies survival[horizon] to bound tails beyond the horizon
    double continuation_sum = 0.0;
    bool certified = false;
};

// Exact quenched survival for walkers started at base and base + offset
// (offset >= 1). The continuation certificate is worst case over atoms, so it
// also covers sites beyond the scanned window.
PairChainResult quenched_pair_survival(const Environment& env, std::int64_t base,
                                       std::int64_t offset, std::int64_t horizon);

// Annealed survival P(L_{0,offset} > s) for the law's embedded jump chain.
PairChainResult annealed_pair_survival(const EnvironmentLaw& law, std::int64_t offset,
                                       std::int64_t horizon);

// sum_{s > from} survival[s], the beyond-horizon part bounded by the
// continuation certificate.
double survival_tail_sum(const PairChainResult& r, std::int64_t from);

// Embedded (holding-free) jump probabilities of one atom, index 1..max_jump.
std::vector<double> embedded_jump_probs(const JumpDistribution& jd, std::int64_t max_jump);

} // namespace rwre

#endif

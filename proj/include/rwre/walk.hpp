#ifndef RWRE_WALK_HPP
#define RWRE_WALK_HPP

#include <cstdint>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

struct Path {
    Lattice start;
    std::vector<Lattice> steps;   // increments X_{n+1} - X_n

    std::size_t length() const { return steps.size(); }
    Lattice position_at(std::size_t n) const {
        Lattice x = start;
        for (std::size_t i = 0; i < n; ++i) x += steps[i];
        return x;
    }
};

// Quenched walk under P_{x0}^omega; deterministic in (env.seed, walk_seed).
Path run_quenched(const Environment& env, const Lattice& x0, std::int64_t n_steps,
                  std::uint64_t walk_seed);

// Regeneration times per sigma_{k+1} = inf{n > sigma_k : X_n.u >= X_{sigma_k}.u + threshold},
// sigma_0 = 0. Only fully observed times are returned.
std::vector<std::int64_t> regeneration_times(const Path& path, const Lattice& u_hat,
                                             double threshold);

// One Theta_k: the walk between consecutive regeneration times.
struct RegenerationBlock {
    std::int64_t duration = 0;
    std::vector<Lattice> increments;
    Lattice displacement;
};

std::vector<RegenerationBlock> blocks_from_path(const Path& path, const Lattice& u_hat,
                                                double threshold);

struct BlockSampleConfig {
    double threshold = 1.0;
    std::int64_t blocks_per_replicate = 64;
    std::int64_t step_cap = 1'000'000;   // per block; exceeding it aborts the replicate
    int n_threads = 0;
    bool keep_increments = false;        // blocks are leaner without the step list
};

struct BlockSample {
    std::vector<RegenerationBlock> blocks;   // ordered by (replicate, block index)
    std::vector<std::int64_t> replicate;     // originating replicate per block
    std::int64_t replicates = 0;
    std::int64_t aborted_replicates = 0;     // hit the step cap; reported, never dropped silently
};

// Annealed block sampling: a fresh environment per replicate, one long walk
// each, all complete blocks harvested. Blocks are i.i.d. across and within
// replicates (Theta_k with K = 0).
BlockSample sample_blocks(const EnvironmentLaw& law, std::int64_t count,
                          std::uint64_t master_seed, const BlockSampleConfig& cfg = {});

// First common points L_1 < L_2 < ... of two independent walks run in the
// same environment (d = 1, both started at 0). Returns the increments
// L_j - L_{j-1} observed below the horizon.
struct CommonPointsResult {
    std::vector<std::int64_t> increments;
    bool horizon_exhausted = false;
};

CommonPointsResult two_walker_common_points(const EnvironmentLaw& law, std::uint64_t env_seed,
                                            std::uint64_t walk_seed_a, std::uint64_t walk_seed_b,
                                            std::int64_t horizon);

// sigma_1 truncated at the cap, sampled annealed; used for divergence probes.
std::vector<std::int64_t> sample_sigma1_truncated(const EnvironmentLaw& law,
                                                  std::int64_t replicates, std::int64_t cap,
                                                  std::uint64_t master_seed, int n_threads = 0);

} // namespace rwre

#endif

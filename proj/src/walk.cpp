#include "rwre/walk.hpp"

#include <algorithm>
#include <stdexcept>

#include "rwre/parallel.hpp"

namespace rwre {

namespace {
constexpr std::uint64_t kWalkTag = 0x77616c6bULL;        // "walk"
constexpr std::uint64_t kEnvTag = 0x626c6f636b656eULL;   // "blocken"
constexpr std::uint64_t kRepTag = 0x626c6f636b777bULL;
} // namespace

Path run_quenched(const Environment& env, const Lattice& x0, std::int64_t n_steps,
                  std::uint64_t walk_seed) {
    Rng rng(hash_combine(env.seed(), kWalkTag), walk_seed);
    Path path;
    path.start = x0;
    path.steps.reserve(static_cast<std::size_t>(n_steps));
    Lattice x = x0;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        const auto& jd = env.site_env(x);
        const Lattice& z = jd.sample(rng.next_unit());
        path.steps.push_back(z);
        x += z;
    }
    return path;
}

std::vector<std::int64_t> regeneration_times(const Path& path, const Lattice& u_hat,
                                             double threshold) {
    if (threshold <= 0.0) throw std::invalid_argument("regeneration_times: threshold > 0 required");
    std::vector<std::int64_t> sigma{0};
    double anchor = 0.0;   // (X_n - X_{sigma_k}) . u_hat accumulated since last regeneration
    for (std::size_t n = 0; n < path.steps.size(); ++n) {
        anchor += static_cast<double>(dot(path.steps[n], u_hat));
        if (anchor >= threshold) {
            sigma.push_back(static_cast<std::int64_t>(n + 1));
            anchor = 0.0;
        }
    }
    return sigma;
}

std::vector<RegenerationBlock> blocks_from_path(const Path& path, const Lattice& u_hat,
                                                double threshold) {
    const auto sigma = regeneration_times(path, u_hat, threshold);
    std::vector<RegenerationBlock> blocks;
    for (std::size_t k = 0; k + 1 < sigma.size(); ++k) {
        RegenerationBlock b;
        b.duration = sigma[k + 1] - sigma[k];
        b.displacement = Lattice::Zero(path.start.size());
        for (std::int64_t n = sigma[k]; n < sigma[k + 1]; ++n) {
            const auto& z = path.steps[static_cast<std::size_t>(n)];
            b.increments.push_back(z);
            b.displacement += z;
        }
        blocks.push_back(std::move(b));
    }
    return blocks;
}

BlockSample sample_blocks(const EnvironmentLaw& law, std::int64_t count,
                          std::uint64_t master_seed, const BlockSampleConfig& cfg) {
    const auto shared_law = std::make_shared<const EnvironmentLaw>(law);
    const std::int64_t per_rep = std::max<std::int64_t>(1, cfg.blocks_per_replicate);
    const std::int64_t replicates = (count + per_rep - 1) / per_rep;

    struct RepResult {
        std::vector<RegenerationBlock> blocks;
        bool aborted = false;
    };
    std::vector<RepResult> results(static_cast<std::size_t>(replicates));

    parallel_for(replicates, [&](std::int64_t r) {
        const std::uint64_t env_seed = hash_combine(hash_combine(master_seed, kEnvTag),
                                                    static_cast<std::uint64_t>(r));
        Environment env(shared_law, env_seed);
        Rng rng(hash_combine(master_seed, kRepTag), static_cast<std::uint64_t>(r));

        auto& out = results[static_cast<std::size_t>(r)];
        Lattice x = Lattice::Zero(law.dim());
        const Lattice& u = law.u_hat();
        double gained = 0.0;
        std::int64_t steps_in_block = 0;
        RegenerationBlock block;
        block.displacement = Lattice::Zero(law.dim());

        while (static_cast<std::int64_t>(out.blocks.size()) < per_rep) {
            const auto& jd = env.site_env(x);
            const Lattice& z = jd.sample(rng.next_unit());
            x += z;
            gained += static_cast<double>(dot(z, u));
            ++steps_in_block;
            if (cfg.keep_increments) block.increments.push_back(z);
            block.displacement += z;
            if (gained >= cfg.threshold) {
                block.duration = steps_in_block;
                out.blocks.push_back(std::move(block));
                block = RegenerationBlock{};
                block.displacement = Lattice::Zero(law.dim());
                gained = 0.0;
                steps_in_block = 0;
            } else if (steps_in_block >= cfg.step_cap) {
                out.aborted = true;   // near-degenerate law; report, keep finished blocks
                break;
            }
        }
    }, cfg.n_threads);

    BlockSample sample;
    sample.replicates = replicates;
    for (std::size_t r = 0; r < results.size(); ++r) {
        auto& rep = results[r];
        if (rep.aborted) ++sample.aborted_replicates;
        for (auto& b : rep.blocks) {
            if (static_cast<std::int64_t>(sample.blocks.size()) < count) {
                sample.blocks.push_back(std::move(b));
                sample.replicate.push_back(static_cast<std::int64_t>(r));
            }
        }
    }
    return sample;
}

CommonPointsResult two_walker_common_points(const EnvironmentLaw& law, std::uint64_t env_seed,
                                            std::uint64_t walk_seed_a, std::uint64_t walk_seed_b,
                                            std::int64_t horizon) {
    if (law.dim() != 1)
        throw std::invalid_argument("two_walker_common_points: d = 1 required");
    Environment env(law, env_seed);
    Rng rng_a(hash_combine(env_seed, kWalkTag), walk_seed_a);
    Rng rng_b(hash_combine(env_seed, kWalkTag), walk_seed_b);

    // Monotone walks: ranges are increasing site sequences, intersected by a
    // two-pointer sweep. Holding steps never change the range, so sampling is
    // over the holding-free chain.
    auto advance = [&](std::int64_t pos, Rng& rng) {
        for (;;) {
            Lattice x(1);
            x[0] = pos;
            const auto& jd = env.site_env(x);
            const Lattice& z = jd.sample(rng.next_unit());
            if (z[0] != 0) return pos + z[0];
        }
    };

    CommonPointsResult out;
    std::int64_t a = 0, b = 0, last = 0;
    // both start at 0; a common point must be >= 1
    a = advance(a, rng_a);
    b = advance(b, rng_b);
    while (a <= horizon && b <= horizon) {
        if (a == b) {
            out.increments.push_back(a - last);
            last = a;
            a = advance(a, rng_a);
            b = advance(b, rng_b);
        } else if (a < b) {
            a = advance(a, rng_a);
        } else {
            b = advance(b, rng_b);
        }
    }
    out.horizon_exhausted = out.increments.empty();
    return out;
}

std::vector<std::int64_t> sample_sigma1_truncated(const EnvironmentLaw& law,
                                                  std::int64_t replicates, std::int64_t cap,
                                                  std::uint64_t master_seed, int n_threads) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(replicates), 0);
    const auto shared_law = std::make_shared<const EnvironmentLaw>(law);
    parallel_for(replicates, [&](std::int64_t r) {
        const std::uint64_t env_seed = hash_combine(hash_combine(master_seed, kEnvTag),
                                                    static_cast<std::uint64_t>(r));
        Environment env(shared_law, env_seed);
        Rng rng(hash_combine(master_seed, kRepTag), static_cast<std::uint64_t>(r));
        Lattice x = Lattice::Zero(law.dim());
        const Lattice& u = law.u_hat();
        std::int64_t n = 0;
        while (n < cap) {
            const auto& jd = env.site_env(x);
            const Lattice& z = jd.sample(rng.next_unit());
            x += z;
            ++n;
            if (dot(x, u) >= 1) break;
        }
        out[static_cast<std::size_t>(r)] = n;
    }, n_threads);
    return out;
}

} // namespace rwre

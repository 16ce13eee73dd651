#pragma once

#include <cstdint>
#include <vector>

#include "tcasim/forest.hpp"
#include "tcasim/sim.hpp"

namespace tcasim {

struct DatasetParams {
    int n_examples = 10000;
    int epochs_cap = 32;
    // true indicator range for the generated honest node
    double behavior_lo = 0.85;
    double behavior_hi = 0.95;

    void validate() const;
};

/// Convergence class for an episode: epochs <= 4 -> 1, 5..8 -> 2, 9..12 -> 3,
/// 13 and up (including never within the cap) -> 4.
int bin_convergence_epoch(int epoch);

/// One single-node baseline episode: the unit over which the calibration
/// bands and the training labels are both defined. The trace starts with the
/// initial state; features snapshot the first epoch (normalized QoS, netC,
/// initial trust, first observed behavior score).
struct Episode {
    std::vector<TrustState> trace;
    FeatureVector features{};
};

Episode run_episode(const SimContext& ctx, Condition condition, TrustState initial,
                    const BehaviorIndicators& truth, int epochs_cap, Rng& rng);

/// Generates labeled training episodes. Each episode draws a profile
/// uniformly from {Good, Medium, Poor}, a random initial trust grid value
/// and an honest node, runs the unboosted single-node simulation to
/// convergence (capped) and labels it with the binned convergence epoch.
/// Features are the first epoch's normalized QoS, netC, the initial trust
/// and the first observed behavior score.
std::vector<LabeledExample> generate_dataset(const SimContext& ctx, const DatasetParams& params,
                                             std::uint64_t seed);

}  // namespace tcasim

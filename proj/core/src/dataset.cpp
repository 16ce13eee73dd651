#include "tcasim/dataset.hpp"

#include <stdexcept>

namespace tcasim {

void DatasetParams::validate() const {
    if (n_examples < 1) throw std::invalid_argument("n_examples must be positive");
    if (epochs_cap < 1) throw std::invalid_argument("epochs_cap must be positive");
    if (!(behavior_lo >= 0.0 && behavior_lo <= behavior_hi && behavior_hi <= 1.0)) {
        throw std::invalid_argument("behavior range must satisfy 0 <= lo <= hi <= 1");
    }
}

int bin_convergence_epoch(int epoch) {
    if (epoch < 0) throw std::invalid_argument("convergence epoch must be nonnegative");
    if (epoch <= 4) return 1;
    if (epoch <= 8) return 2;
    if (epoch <= 12) return 3;
    return 4;
}

Episode run_episode(const SimContext& ctx, Condition condition, TrustState initial,
                    const BehaviorIndicators& truth, int epochs_cap, Rng& rng) {
    if (epochs_cap < 1) throw std::invalid_argument("epochs_cap must be positive");
    const NetworkProfile& profile = ctx.profile_for(condition);

    Episode ep;
    TrustState state = initial;
    ep.trace.push_back(state);
    std::optional<QosSample> prev;
    for (int epoch = 1; epoch <= epochs_cap; ++epoch) {
        const QosSample q = sample_profile(profile, prev, rng);
        prev = q;
        const NormalizedQos norm = normalize(q, ctx.bounds);
        const double netc = compute_netc(norm, ctx.weights);
        const auto obs =
            observe_behavior(truth, q, ctx.trust.n_obs, ctx.trust.noise_amplitude, rng);
        const double score = obs ? behavior_score(*obs, ctx.trust) : 0.5;
        if (epoch == 1) {
            ep.features = {norm.snr_n, norm.pl_n,       norm.j_n, norm.l_n, norm.t_n,
                           norm.sinr_n, netc, initial.value(), score};
        }
        if (obs) {
            state = step_trust(state, transition_probs(score, netc, 1.0, ctx.trust), rng);
        }
        ep.trace.push_back(state);
    }
    return ep;
}

std::vector<LabeledExample> generate_dataset(const SimContext& ctx, const DatasetParams& params,
                                             std::uint64_t seed) {
    params.validate();
    constexpr Condition kConditions[] = {Condition::Good, Condition::Medium, Condition::Poor};

    std::vector<LabeledExample> dataset;
    dataset.reserve(params.n_examples);
    for (int i = 0; i < params.n_examples; ++i) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(i)));
        const Condition cond = kConditions[rng.uniform_int(3)];
        const TrustState initial{static_cast<int>(rng.uniform_int(11))};
        const BehaviorIndicators truth{rng.uniform(params.behavior_lo, params.behavior_hi),
                                       rng.uniform(params.behavior_lo, params.behavior_hi),
                                       rng.uniform(params.behavior_lo, params.behavior_hi)};
        const Episode ep = run_episode(ctx, cond, initial, truth, params.epochs_cap, rng);
        const auto ct = detect_convergence(ep.trace, false, ctx.trust, ctx.sim.k_stable);
        dataset.push_back({ep.features, ct ? bin_convergence_epoch(*ct) : 4});
    }
    return dataset;
}

}  // namespace tcasim

#include "tcasim/trust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcasim {

namespace {

constexpr double kBfMax = 1.2 + 1e-9;  // sanity bound on the boosting factor

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require_unit(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
    }
}

}  // namespace

TrustState trust_state_from_value(double v) {
    const double scaled = v * 10.0;
    const int idx = static_cast<int>(std::lround(scaled));
    if (!std::isfinite(v) || idx < 0 || idx > 10 || std::abs(scaled - idx) > 1e-9) {
        throw std::invalid_argument("trust value must lie on the 0.1 grid in [0, 1]");
    }
    return TrustState{idx};
}

void TrustParams::validate() const {
    const double sum = w_cooperation + w_direct + w_indirect;
    if (std::abs(sum - 1.0) > 1e-9 || w_cooperation < 0.0 || w_direct < 0.0 || w_indirect < 0.0) {
        throw std::invalid_argument("indicator weights must be convex");
    }
    require_unit(theta_up, "theta_up");
    require_unit(q_floor, "q_floor");
    require_unit(trusted_threshold, "trusted_threshold");
    require_unit(untrusted_threshold, "untrusted_threshold");
    require_unit(noise_amplitude, "noise_amplitude");
    require_unit(misread_rate, "misread_rate");
    if (n_obs <= 0) throw std::invalid_argument("n_obs must be positive");
    if (untrusted_threshold >= trusted_threshold) {
        throw std::invalid_argument("untrusted_threshold must be below trusted_threshold");
    }
}

std::optional<BehaviorIndicators> observe_behavior(const BehaviorIndicators& truth,
                                                   const QosSample& qos, int n_obs,
                                                   double noise_amplitude, Rng& rng) {
    require_unit(truth.cooperation, "cooperation");
    require_unit(truth.direct_honesty, "direct_honesty");
    require_unit(truth.indirect_honesty, "indirect_honesty");
    require_unit(qos.packet_loss, "packet_loss");
    if (n_obs <= 0) throw std::invalid_argument("n_obs must be positive");

    if (qos.packet_loss >= 1.0) return std::nullopt;  // no probe can get through

    const double p = truth.cooperation * (1.0 - qos.packet_loss);
    int successes = 0;
    for (int i = 0; i < n_obs; ++i) {
        if (rng.bernoulli(p)) ++successes;
    }
    BehaviorIndicators obs;
    obs.cooperation = static_cast<double>(successes) / n_obs;
    obs.direct_honesty =
        clamp01(truth.direct_honesty + rng.uniform(-noise_amplitude, noise_amplitude));
    obs.indirect_honesty =
        clamp01(truth.indirect_honesty + rng.uniform(-noise_amplitude, noise_amplitude));
    return obs;
}

double behavior_score(const BehaviorIndicators& ind, const TrustParams& params) {
    return params.w_cooperation * ind.cooperation + params.w_direct * ind.direct_honesty +
           params.w_indirect * ind.indirect_honesty;
}

TransitionProbs transition_probs(double s_obs, double netc, double bf, const TrustParams& params) {
    require_unit(s_obs, "s_obs");
    require_unit(netc, "netC");
    if (!std::isfinite(bf) || bf < 1.0 || bf > kBfMax) {
        throw std::invalid_argument("boosting factor outside [1, 1.2]");
    }

    const double q = std::clamp(netc, params.q_floor, 1.0);
    const double theta_down = params.theta_up / bf;

    TransitionProbs p;
    if (s_obs >= params.theta_up) {
        p.up = std::min(1.0, q * bf);
        if (bf == 1.0 && netc < 0.8) {
            // A network-oblivious evaluator misreads part of the upward
            // evidence as inconclusive when the channel is damaged; the
            // discarded fraction grows as netC falls. Boosted evaluation
            // (bf > 1) attributes the damage to the channel instead.
            p.up *= 1.0 - params.misread_rate * (0.8 - netc) / 0.8;
        }
    } else if (s_obs < theta_down) {
        p.down = q;
    }
    // between theta_down and theta_up both directions stay at zero
    p.stay = 1.0 - p.up - p.down;
    return p;
}

TrustState step_trust(TrustState state, const TransitionProbs& probs, Rng& rng) {
    if (state.index < 0 || state.index > 10) {
        throw std::invalid_argument("trust state off the grid");
    }
    if (probs.up < -1e-12 || probs.down < -1e-12 || probs.stay < -1e-12 ||
        std::abs(probs.up + probs.down + probs.stay - 1.0) > 1e-12) {
        throw std::invalid_argument("transition probabilities must be a distribution");
    }
    const double u = rng.uniform01();
    int idx = state.index;
    if (u < probs.up) {
        idx = std::min(10, idx + 1);  // ceiling absorbs the blocked up-move
    } else if (u < probs.up + probs.down) {
        idx = std::max(0, idx - 1);  // floor absorbs the blocked down-move
    }
    return TrustState{idx};
}

double aggregate_indirect(std::span<const Recommendation> recs, double untrusted_threshold) {
    double weighted = 0.0;
    double total = 0.0;
    for (const Recommendation& r : recs) {
        require_unit(r.value, "recommendation value");
        const double t = r.recommender_trust.value();
        if (t > untrusted_threshold) {
            weighted += r.value * t;
            total += t;
        }
    }
    if (total <= 0.0) return 0.5;  // no usable feedback: neutral
    return weighted / total;
}

double recommendation_penalty(std::span<const double> recs_given, double cl_direct_view) {
    require_unit(cl_direct_view, "cl_direct_view");
    if (recs_given.empty()) return 1.0;
    double dev = 0.0;
    for (double r : recs_given) {
        require_unit(r, "recommendation value");
        dev += std::abs(r - cl_direct_view);
    }
    return 1.0 - dev / static_cast<double>(recs_given.size());
}

double recommendation_penalty(std::span<const std::pair<double, double>> rec_vs_view) {
    if (rec_vs_view.empty()) return 1.0;
    double dev = 0.0;
    for (const auto& [rec, view] : rec_vs_view) {
        require_unit(rec, "recommendation value");
        require_unit(view, "cl_direct_view");
        dev += std::abs(rec - view);
    }
    return 1.0 - dev / static_cast<double>(rec_vs_view.size());
}

}  // namespace tcasim

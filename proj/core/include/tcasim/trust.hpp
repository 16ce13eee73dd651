#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tcasim/qos.hpp"
#include "tcasim/rng.hpp"

namespace tcasim {

/// One of the eleven discrete trust levels {0.0, 0.1, ..., 1.0}. The integer
/// index 0..10 is canonical; the real value is always index/10.
struct TrustState {
    int index = 5;

    double value() const { return index / 10.0; }
    bool operator==(const TrustState&) const = default;
};

/// Makes a TrustState from a grid value, rejecting off-grid inputs.
TrustState trust_state_from_value(double v);

/// The three behavioral indicators, each in [0, 1]:
/// cooperation (packet forwarding), direct honesty (role adherence as seen
/// by the community leader), indirect honesty (aggregated peer feedback).
struct BehaviorIndicators {
    double cooperation = 0.0;
    double direct_honesty = 0.0;
    double indirect_honesty = 0.0;
};

struct TrustParams {
    double w_cooperation = 1.0 / 3.0;
    double w_direct = 1.0 / 3.0;
    double w_indirect = 1.0 / 3.0;
    double theta_up = 0.5;            // score at or above -> upward evidence
    int n_obs = 10;                   // interaction probes per epoch
    double q_floor = 0.3;             // lower clamp on evidence quality (calibrated)
    double trusted_threshold = 0.8;
    double untrusted_threshold = 0.3;
    double noise_amplitude = 0.05;    // +-noise on observed honesty values
    double misread_rate = 0.3;        // see transition_probs

    void validate() const;
};

/// One-step transition distribution over {up, down, stay}.
struct TransitionProbs {
    double up = 0.0;
    double down = 0.0;
    double stay = 1.0;
};

/// Community-leader observation of a node for one epoch.
///
/// Each of n_obs probes independently succeeds with probability
/// cooperation * (1 - packet_loss); observed cooperation is the success
/// fraction. Honesty indicators pass through with additive uniform noise of
/// +-noise_amplitude, clamped to [0, 1]. Returns nullopt when packet_loss is
/// 1 (no probe can be delivered, so there is no evidence this epoch).
std::optional<BehaviorIndicators> observe_behavior(const BehaviorIndicators& truth,
                                                   const QosSample& qos, int n_obs,
                                                   double noise_amplitude, Rng& rng);

/// Weighted aggregate of the indicators; weights must be convex.
double behavior_score(const BehaviorIndicators& ind, const TrustParams& params);

/// One-step transition distribution for the trust chain.
///
/// Evidence quality q = clamp(netC, q_floor, 1) scales how fast trust can
/// move in either direction. The boosting factor bf raises p_up and lowers
/// the misbehavior threshold to theta' = theta_up / bf, opening a tolerance
/// band [theta', theta_up) in which the state holds still.
///
///   s_obs >= theta_up : p_up = min(1, q * bf), p_down = 0
///   s_obs <  theta'   : p_down = q
///   otherwise         : p_up = p_down = 0
///
/// An unboosted evaluator (bf == 1) cannot tell channel damage from
/// lukewarm behaviour: under a degraded channel (netC < 0.8) it misreads a
/// good-behaviour epoch as inconclusive with probability
/// misread_rate * (0.8 - netC) / 0.8 and discards the upward evidence, so
/// p_up shrinks by that factor. This is what stretches trust establishment
/// under poor conditions; it never adds downward mass, so honest ascent
/// stays monotone. A boosted evaluator (bf > 1) attributes the damage to
/// the channel and keeps the full upward evidence.
///
/// Rejects bf outside [1, 1.2 + eps], which signals a boosting bug upstream.
TransitionProbs transition_probs(double s_obs, double netc, double bf, const TrustParams& params);

/// Draws the next state: one uniform draw, thresholded against (up, down).
/// Boundary states absorb the blocked direction (no move past 0.0 or 1.0).
TrustState step_trust(TrustState state, const TransitionProbs& probs, Rng& rng);

/// A recommendation value together with the recommender's current trust.
struct Recommendation {
    double value = 0.0;
    TrustState recommender_trust;
};

/// Trust-weighted mean of recommendations from recommenders whose trust
/// exceeds untrusted_threshold; 0.5 (neutral) when none qualify.
double aggregate_indirect(std::span<const Recommendation> recs, double untrusted_threshold);

/// Honesty adjustment for a recommender: 1 - mean |rec - cl_direct_view|
/// over the recommendations it gave this epoch. 1 when it gave none.
double recommendation_penalty(std::span<const double> recs_given, double cl_direct_view);

/// Same adjustment when each recommendation is checked against the leader's
/// direct view of that particular target.
double recommendation_penalty(std::span<const std::pair<double, double>> rec_vs_view);

}  // namespace tcasim

#pragma once

#include "tcasim/qos.hpp"
#include "tcasim/trust.hpp"

namespace tcasim {

struct BoostParams {
    double lambda = 0.2;       // boosting intensity; bf is capped at 1 + lambda
    double netc_cutoff = 0.8;  // at or above this netC no boosting is applied
    int max_t = 16;            // convergence-time normalizer (epochs)

    void validate() const;
};

/// Output of the convergence predictor: a class id (1-based) and the
/// representative convergence time pc for that class.
struct ConvergencePrediction {
    int class_id = 1;
    int pc = 4;
};

/// Representative convergence time for a class id under the default binning:
/// class 1 -> 4, 2 -> 8, 3 -> 12, 4 -> 16 epochs.
int class_to_pc(int class_id);

/// Boosting factor
///   bf = 1 + (1 - netC) * lambda * min(pc / max_t, 1)
/// for netC below the cutoff, and exactly 1 otherwise. Monotone
/// nonincreasing in netC, nondecreasing in pc, always within [1, 1+lambda].
double boost_factor(double netc, const ConvergencePrediction& prediction,
                    const BoostParams& params);

/// Convenience composition: transition_probs with the boosted bf.
TransitionProbs boosted_probs(double s_obs, double netc, const ConvergencePrediction& prediction,
                              const TrustParams& trust_params, const BoostParams& boost_params);

/// Predictor used when no trained model is available: condition class maps
/// straight to a convergence class (Good -> 1, Medium -> 2, Poor -> 3).
ConvergencePrediction fallback_prediction(double netc);

}  // namespace tcasim

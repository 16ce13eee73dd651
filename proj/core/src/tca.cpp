#include "tcasim/tca.hpp"

#include <cmath>
#include <stdexcept>

#include "tcasim/forest.hpp"

namespace tcasim {

void BoostParams::validate() const {
    if (!std::isfinite(lambda) || lambda < 0.0 || lambda > 0.2 + 1e-12) {
        throw std::invalid_argument("lambda must be in [0, 0.2]");
    }
    if (!std::isfinite(netc_cutoff) || netc_cutoff <= 0.0 || netc_cutoff > 1.0) {
        throw std::invalid_argument("netc_cutoff must be in (0, 1]");
    }
    if (max_t <= 0) throw std::invalid_argument("max_t must be positive");
}

int class_to_pc(int class_id) {
    if (class_id < 1 || class_id > kNumClasses) {
        throw std::invalid_argument("class id outside 1..4");
    }
    return 4 * class_id;
}

double boost_factor(double netc, const ConvergencePrediction& prediction,
                    const BoostParams& params) {
    if (!std::isfinite(netc)) throw std::invalid_argument("non-finite netC");
    params.validate();
    if (prediction.pc <= 0) throw std::invalid_argument("predicted convergence time must be positive");

    if (netc >= params.netc_cutoff) return 1.0;  // healthy channel: no boosting
    const double horizon = std::min(static_cast<double>(prediction.pc) / params.max_t, 1.0);
    return 1.0 + (1.0 - netc) * params.lambda * horizon;
}

TransitionProbs boosted_probs(double s_obs, double netc, const ConvergencePrediction& prediction,
                              const TrustParams& trust_params, const BoostParams& boost_params) {
    const double bf = boost_factor(netc, prediction, boost_params);
    return transition_probs(s_obs, netc, bf, trust_params);
}

ConvergencePrediction fallback_prediction(double netc) {
    int class_id = 1;
    switch (classify_condition(netc)) {
        case Condition::Good: class_id = 1; break;
        case Condition::Medium: class_id = 2; break;
        case Condition::Poor: class_id = 3; break;
    }
    return ConvergencePrediction{class_id, class_to_pc(class_id)};
}

}  // namespace tcasim

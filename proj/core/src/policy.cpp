#include "tcasim/policy.hpp"

#include <stdexcept>

namespace tcasim {

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Active: return "Active";
        case Phase::Isolated: return "Isolated";
        case Phase::Quarantined: return "Quarantined";
        case Phase::Reintegrating: return "Reintegrating";
    }
    return "?";
}

void PolicyParams::validate() const {
    if (isolate_threshold < 0.0 || isolate_threshold > 1.0 || reintegrate_threshold < 0.0 ||
        reintegrate_threshold > 1.0) {
        throw std::invalid_argument("policy thresholds must be in [0, 1]");
    }
    if (isolate_threshold >= reintegrate_threshold) {
        throw std::invalid_argument("isolate_threshold must be below reintegrate_threshold");
    }
    if (quarantine_window <= 0 || probation_length <= 0) {
        throw std::invalid_argument("policy windows must be positive");
    }
}

PolicyStep evaluate_policy(const Lifecycle& lc, TrustState trust, const PolicyParams& params) {
    const double t = trust.value();
    switch (lc.phase) {
        case Phase::Active:
            if (t <= params.isolate_threshold) {
                return {{Phase::Isolated, 0}, true};
            }
            return {{Phase::Active, 0}, false};
        case Phase::Isolated:
            return {{Phase::Quarantined, 0}, false};
        case Phase::Quarantined:
            if (t >= params.reintegrate_threshold) {
                return {{Phase::Reintegrating, params.probation_length}, false};
            }
            if (lc.counter + 1 >= params.quarantine_window) {
                // window exhausted without recovery; the server already knows
                return {{Phase::Isolated, 0}, false};
            }
            return {{Phase::Quarantined, lc.counter + 1}, false};
        case Phase::Reintegrating:
            if (t <= params.isolate_threshold) {
                return {{Phase::Isolated, 0}, true};  // re-offense during probation
            }
            if (lc.counter == 0) {
                return {{Phase::Active, 0}, false};
            }
            return {{Phase::Reintegrating, lc.counter - 1}, false};
    }
    throw std::invalid_argument("unknown lifecycle phase");
}

bool participates(const Lifecycle& lc) {
    return lc.phase == Phase::Active || lc.phase == Phase::Reintegrating;
}

bool monitored(const Lifecycle& lc) { return lc.phase != Phase::Isolated; }

bool ServerView::propagate_alert(const Alert& alert) {
    auto [it, inserted] = first_flag_.emplace(alert.node_id, alert);
    return inserted;
}

}  // namespace tcasim

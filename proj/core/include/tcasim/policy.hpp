#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tcasim/trust.hpp"

namespace tcasim {

/// Lifecycle of a node under the graduated response policy.
enum class Phase { Active, Isolated, Quarantined, Reintegrating };

const char* to_string(Phase p);

/// Phase plus its counter: epochs elapsed in quarantine, or probation epochs
/// remaining while reintegrating. Unused (0) for the other phases.
struct Lifecycle {
    Phase phase = Phase::Active;
    int counter = 0;

    bool operator==(const Lifecycle&) const = default;
};

struct PolicyParams {
    double isolate_threshold = 0.3;      // trust at or below -> isolate
    double reintegrate_threshold = 0.6;  // quarantined trust at or above -> probation
    int quarantine_window = 5;           // epochs per quarantine evaluation cycle
    int probation_length = 5;            // reintegration probation epochs

    void validate() const;
};

/// Alert raised towards the server when a node is isolated.
struct Alert {
    int epoch = 0;
    int community = 0;
    int node_id = 0;
    double trust_at_isolation = 0.0;
};

/// One policy evaluation step; returns the next lifecycle and whether an
/// alert must be emitted (exactly on Active->Isolated and
/// Reintegrating->Isolated transitions).
///
///   Active:        trust <= isolate -> Isolated (+alert)
///   Isolated:      -> Quarantined(0)
///   Quarantined(e): trust >= reintegrate -> Reintegrating(P);
///                   e+1 == window and still below -> Isolated (no alert,
///                   the server already knows); else Quarantined(e+1)
///   Reintegrating(r): trust <= isolate -> Isolated (+alert);
///                   r == 0 -> Active; else Reintegrating(r-1)
struct PolicyStep {
    Lifecycle next;
    bool alert = false;
};

PolicyStep evaluate_policy(const Lifecycle& lc, TrustState trust, const PolicyParams& params);

/// True when the node takes part in cooperation and recommendation exchange
/// (Active or Reintegrating). Isolated and Quarantined nodes are still
/// observed by the community leader but emit no recommendations, receive
/// none, and get no cooperation tasks.
bool participates(const Lifecycle& lc);

/// Whether the community leader monitors the node this epoch. Isolated is a
/// hard one-epoch cutoff with the trust state frozen; quarantined nodes are
/// re-evaluated from direct leader observation.
bool monitored(const Lifecycle& lc);

/// Server-side registry of flagged nodes; re-raising an alert for a node
/// already flagged is a no-op (idempotent at the server view).
class ServerView {
public:
    /// Returns true when the alert changed the view (first flag).
    bool propagate_alert(const Alert& alert);

    bool flagged(int node_id) const { return first_flag_.count(node_id) > 0; }
    std::size_t flag_count() const { return first_flag_.size(); }

private:
    std::map<int, Alert> first_flag_;
};

}  // namespace tcasim

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcasim/forest.hpp"
#include "tcasim/policy.hpp"
#include "tcasim/qos.hpp"
#include "tcasim/tca.hpp"
#include "tcasim/trust.hpp"

namespace tcasim {

enum class Role { Honest, BadMouther, NonCooperative };
enum class Mode { Baseline, Tca };

const char* to_string(Role r);
const char* to_string(Mode m);
std::optional<Role> role_from_string(const std::string& s);
std::optional<Mode> mode_from_string(const std::string& s);

/// Static description of one member node. Honest nodes cooperate and
/// recommend truthfully; bad-mouthers cooperate but report near-zero trust
/// about others (1.0 about fellow attackers when colluding); non-cooperative
/// nodes simply fail their forwarding duties.
struct NodeSpec {
    int node_id = 0;
    int community_id = 0;
    Role role = Role::Honest;
    BehaviorIndicators true_behavior{0.95, 0.95, 0.95};
};

/// A profile switch taking effect at `epoch`; a plain run has one entry.
struct SchedulePoint {
    int epoch = 0;
    Condition profile = Condition::Poor;
};

struct SimParams {
    int n_nodes = 50;
    int community_size = 25;
    double p_m = 0.0;                        // floor(p_m * n_nodes) attackers
    Role malicious_role = Role::BadMouther;
    bool collusion = false;
    bool per_node_channel = false;           // default: one channel per community
    int epochs_cap = 32;
    int k_stable = 3;                        // epochs of stability to call convergence
    TrustState initial_trust{5};
    std::vector<SchedulePoint> schedule{{0, Condition::Poor}};

    void validate() const;
};

/// Everything a run needs besides the seed and the mode.
struct SimContext {
    NormalizationBounds bounds;
    NetCWeights weights;
    NetworkProfile good;
    NetworkProfile medium;
    NetworkProfile poor;
    TrustParams trust;
    BoostParams boost;
    PolicyParams policy;
    SimParams sim;

    const NetworkProfile& profile_for(Condition c) const;
};

/// Convergence predictor: a trained forest when available, otherwise the
/// deterministic netC-class fallback.
struct Predictor {
    const Forest* forest = nullptr;

    ConvergencePrediction predict(const FeatureVector& features, double netc) const;
};

struct ConvergenceRecord {
    std::uint64_t seed = 0;
    int node_id = 0;
    Role role = Role::Honest;
    std::string profile;  // label of the run's (first) profile
    Mode mode = Mode::Baseline;
    std::optional<int> convergence_epoch;
    TrustState final_state;
};

struct DiagnosticsRow {
    int epoch = 0;
    int community = 0;
    double netc = 0.0;
    double pc_mean = 0.0;  // 0 in baseline mode
    double bf_mean = 1.0;
};

struct QosTraceRow {
    int epoch = 0;
    QosSample sample;
    double netc = 0.0;
};

struct TrajectoryRow {
    int epoch = 0;
    int node_id = 0;
    TrustState state;
};

struct RunResult {
    std::vector<ConvergenceRecord> records;      // one per node
    std::vector<DiagnosticsRow> diagnostics;     // per epoch per community
    std::vector<Alert> alerts;
    std::vector<QosTraceRow> qos_trace;          // community 0
    std::vector<TrajectoryRow> trajectories;     // per epoch per node
};

/// Nodes grouped into ceil(n/community_size) communities; exactly
/// floor(p_m * n) nodes get the malicious role, placed uniformly at random.
/// Rejects p_m outside [0, 1) and non-positive sizes.
std::vector<NodeSpec> build_network(const SimParams& params, Rng& rng);

/// First epoch index e such that the trace holds at or beyond the trusted
/// threshold (honest) or at or below the untrusted threshold (malicious) for
/// k_stable consecutive entries. Index 0 is the initial state.
std::optional<int> detect_convergence(std::span<const TrustState> trace, bool malicious,
                                      const TrustParams& trust, int k_stable);

/// Runs one seeded simulation to epochs_cap. Node updates happen in
/// node_id order; communities share one sampled channel per epoch unless
/// per_node_channel is set. The baseline and boosted pipelines consume
/// identical draw sequences, so runs where netC never drops below the
/// cutoff are bitwise identical across modes.
RunResult run_simulation(const SimContext& ctx, Mode mode, const Predictor& predictor,
                         std::uint64_t seed);

/// Aggregate statistics over the honest records of one experiment group.
struct GroupSummary {
    std::string group_key;
    Mode mode = Mode::Baseline;
    double mean_ct = 0.0;    // mean convergence epoch over converged honest nodes
    double std_ct = 0.0;     // sample standard deviation
    long n = 0;              // converged honest nodes
    long n_censored = 0;     // honest nodes that never converged
    double ci95_half = 0.0;  // 1.96 * std / sqrt(n)
    double classification_accuracy = 0.0;  // over all nodes, final state vs role
};

GroupSummary summarize(std::span<const ConvergenceRecord> records, const std::string& group_key,
                       Mode mode, const TrustParams& trust);

struct TimingRow {
    std::string group_key;
    Mode mode = Mode::Baseline;
    int runs = 0;
    double seconds_total = 0.0;
};

struct ExperimentResult {
    std::vector<ConvergenceRecord> records;
    std::vector<GroupSummary> summary;
    std::vector<DiagnosticsRow> diagnostics;  // first boosted run (or first run)
    std::vector<Alert> alerts;                // same run as diagnostics
    std::vector<QosTraceRow> qos_trace;       // same run, community 0
    std::vector<TimingRow> timings;           // scalability sweep only
};

/// Convergence sweep: profiles {Good, Medium, Poor} x modes, `seeds` runs
/// each starting at seed0.
ExperimentResult experiment_convergence(const SimContext& ctx, const Predictor& predictor,
                                        int seeds, std::uint64_t seed0);

/// Bad-mouthing sweep: p_m in {0.2, 0.3, 0.4, 0.5} x modes at the context's
/// profile schedule (Poor by default), malicious role BadMouther. The run
/// horizon is stretched to at least 6 * max_t epochs so the final-epoch
/// classification check happens well after every node has settled.
ExperimentResult experiment_badmouthing(const SimContext& ctx, const Predictor& predictor,
                                        int seeds, std::uint64_t seed0);

/// Scalability sweep: n_nodes in {50, 100, 150, 200, 250} x modes, Poor
/// profile, with wall-clock per size.
ExperimentResult experiment_scalability(const SimContext& ctx, const Predictor& predictor,
                                        int seeds, std::uint64_t seed0);

struct CalibratePoint {
    double q_floor = 0.0;
    double poor_center = 0.0;
    double good_mean = 0.0;
    double poor_mean = 0.0;
    bool feasible = false;
};

struct CalibrateParams {
    std::vector<double> q_floor_grid{0.15, 0.2, 0.25, 0.3};
    std::vector<double> poor_center_grid{0.25, 0.3, 0.35};
    double good_lo = 3.0, good_hi = 5.0;  // target band for Good baseline mean
    double poor_lo = 10.0, poor_hi = 14.0;
    int runs = 500;

    // Rejects empty grids and non-positive run counts. Inverted or empty
    // target bands are legal inputs; they simply make every point infeasible.
    void validate() const;
};

struct CalibrateResult {
    bool feasible = false;
    double q_floor = 0.0;
    double poor_center = 0.0;
    std::vector<CalibratePoint> report;  // every grid point, grid order
};

/// Grid search over (q_floor, Poor netC center) against the baseline
/// convergence bands; among feasible points it picks the one whose means sit
/// closest to the band centres (ties resolve to earlier grid order), so the
/// choice is robust to reseeding. When none fits, feasible is false and the
/// report still carries every point so the caller can list the nearest
/// misses.
CalibrateResult calibrate(const SimContext& ctx, const CalibrateParams& params,
                          std::uint64_t seed0);

}  // namespace tcasim

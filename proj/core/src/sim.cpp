#include "tcasim/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tcasim/dataset.hpp"

namespace tcasim {

const char* to_string(Role r) {
    switch (r) {
        case Role::Honest: return "honest";
        case Role::BadMouther: return "bad_mouther";
        case Role::NonCooperative: return "non_cooperative";
    }
    return "?";
}

const char* to_string(Mode m) {
    return m == Mode::Baseline ? "baseline" : "tca";
}

std::optional<Role> role_from_string(const std::string& s) {
    if (s == "honest") return Role::Honest;
    if (s == "bad_mouther") return Role::BadMouther;
    if (s == "non_cooperative") return Role::NonCooperative;
    return std::nullopt;
}

std::optional<Mode> mode_from_string(const std::string& s) {
    if (s == "baseline") return Mode::Baseline;
    if (s == "tca") return Mode::Tca;
    return std::nullopt;
}

void SimParams::validate() const {
    if (community_size < 2) throw std::invalid_argument("community_size must be at least 2");
    if (n_nodes < community_size) {
        throw std::invalid_argument("n_nodes must be at least community_size");
    }
    if (!(p_m >= 0.0) || p_m >= 1.0) throw std::invalid_argument("p_m must be in [0, 1)");
    if (p_m > 0.0 && malicious_role == Role::Honest) {
        throw std::invalid_argument("malicious_role must not be honest when p_m > 0");
    }
    if (epochs_cap < 1) throw std::invalid_argument("epochs_cap must be at least 1");
    if (k_stable < 1) throw std::invalid_argument("k_stable must be at least 1");
    if (initial_trust.index < 0 || initial_trust.index > 10) {
        throw std::invalid_argument("initial_trust off the 11-state grid");
    }
    if (schedule.empty() || schedule.front().epoch != 0) {
        throw std::invalid_argument("schedule must start at epoch 0");
    }
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (schedule[i].epoch <= schedule[i - 1].epoch) {
            throw std::invalid_argument("schedule epochs must be strictly increasing");
        }
    }
}

const NetworkProfile& SimContext::profile_for(Condition c) const {
    switch (c) {
        case Condition::Good: return good;
        case Condition::Medium: return medium;
        case Condition::Poor: return poor;
    }
    return poor;
}

ConvergencePrediction Predictor::predict(const FeatureVector& features, double netc) const {
    if (forest == nullptr) return fallback_prediction(netc);
    const int cls = tcasim::predict(*forest, features);
    return ConvergencePrediction{cls, class_to_pc(cls)};
}

std::vector<NodeSpec> build_network(const SimParams& params, Rng& rng) {
    params.validate();
    const int n = params.n_nodes;
    const int n_malicious = static_cast<int>(std::floor(params.p_m * n));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<bool> malicious(n, false);
    for (int k = 0; k < n_malicious; ++k) malicious[order[k]] = true;

    std::vector<NodeSpec> specs(n);
    for (int id = 0; id < n; ++id) {
        NodeSpec& s = specs[id];
        s.node_id = id;
        s.community_id = id / params.community_size;
        s.role = malicious[id] ? params.malicious_role : Role::Honest;
        switch (s.role) {
            case Role::Honest:
            case Role::BadMouther:  // cooperates normally; the lying is in its recommendations
                s.true_behavior = {0.95, 0.95, 0.95};
                break;
            case Role::NonCooperative:
                s.true_behavior = {0.1, 0.3, 0.95};
                break;
        }
    }
    return specs;
}

std::optional<int> detect_convergence(std::span<const TrustState> trace, bool malicious,
                                      const TrustParams& trust, int k_stable) {
    if (trace.empty()) throw std::invalid_argument("empty trust trace");
    if (k_stable < 1) throw std::invalid_argument("k_stable must be at least 1");
    const auto settled = [&](const TrustState& s) {
        return malicious ? s.value() <= trust.untrusted_threshold
                         : s.value() >= trust.trusted_threshold;
    };
    for (std::size_t e = 0; e + k_stable <= trace.size(); ++e) {
        bool ok = true;
        for (int t = 0; t < k_stable && ok; ++t) ok = settled(trace[e + t]);
        if (ok) return static_cast<int>(e);
    }
    return std::nullopt;
}

namespace {

Condition condition_at(const std::vector<SchedulePoint>& schedule, int epoch) {
    Condition c = schedule.front().profile;
    for (const SchedulePoint& p : schedule) {
        if (p.epoch <= epoch - 1) c = p.profile;  // a point at k governs epochs k+1 onwards
    }
    return c;
}

NormalizedQos mean_normalized(const std::vector<NormalizedQos>& qs) {
    NormalizedQos m;
    for (const NormalizedQos& q : qs) {
        m.snr_n += q.snr_n;
        m.pl_n += q.pl_n;
        m.j_n += q.j_n;
        m.l_n += q.l_n;
        m.t_n += q.t_n;
        m.sinr_n += q.sinr_n;
    }
    const double k = qs.empty() ? 1.0 : static_cast<double>(qs.size());
    m.snr_n /= k;
    m.pl_n /= k;
    m.j_n /= k;
    m.l_n /= k;
    m.t_n /= k;
    m.sinr_n /= k;
    return m;
}

struct NodeRt {
    NodeSpec spec;
    TrustState trust;
    Lifecycle lc;
    double last_penalty = 1.0;  // persists across epochs; frozen while the node is muted
    std::optional<BehaviorIndicators> obs;
    double score = 0.0;
};

}  // namespace

RunResult run_simulation(const SimContext& ctx, Mode mode, const Predictor& predictor,
                         std::uint64_t seed) {
    ctx.sim.validate();
    ctx.bounds.validate();
    ctx.weights.validate();
    ctx.trust.validate();
    ctx.boost.validate();
    ctx.policy.validate();

    Rng rng(seed);
    const std::vector<NodeSpec> specs = build_network(ctx.sim, rng);
    const int n = static_cast<int>(specs.size());
    const int cs = ctx.sim.community_size;
    const int n_comm = (n + cs - 1) / cs;
    const bool per_node = ctx.sim.per_node_channel;
    const int n_channels = per_node ? n : n_comm;

    std::vector<NodeRt> nodes(n);
    std::vector<std::vector<TrustState>> traces(n);
    for (int i = 0; i < n; ++i) {
        nodes[i].spec = specs[i];
        nodes[i].trust = ctx.sim.initial_trust;
        traces[i].push_back(nodes[i].trust);
    }

    std::vector<std::vector<int>> members(n_comm);
    for (int i = 0; i < n; ++i) members[specs[i].community_id].push_back(i);

    RunResult res;
    for (int i = 0; i < n; ++i) res.trajectories.push_back({0, i, nodes[i].trust});

    ServerView server;
    std::vector<std::optional<QosSample>> prev(n_channels);
    std::vector<QosSample> sample(n_channels);
    std::vector<NormalizedQos> norm(n_channels);
    std::vector<double> netc(n_channels);
    std::vector<double> comm_netc(n_comm);
    std::vector<NormalizedQos> comm_norm(n_comm);
    std::vector<double> comm_bf(n_comm, 1.0);
    std::vector<int> comm_pc(n_comm, 0);
    std::vector<std::vector<Recommendation>> rec_about(n);
    std::vector<std::vector<std::pair<double, double>>> rec_given(n);

    const auto channel_of = [&](int node_id) { return per_node ? node_id : specs[node_id].community_id; };

    for (int epoch = 1; epoch <= ctx.sim.epochs_cap; ++epoch) {
        const Condition cond = condition_at(ctx.sim.schedule, epoch);
        const NetworkProfile& profile = ctx.profile_for(cond);

        // Channel: one AR(1) chain per community (or per node when configured).
        for (int ch = 0; ch < n_channels; ++ch) {
            sample[ch] = sample_profile(profile, prev[ch], rng);
            prev[ch] = sample[ch];
            norm[ch] = normalize(sample[ch], ctx.bounds);
            netc[ch] = compute_netc(norm[ch], ctx.weights);
        }
        if (per_node) {
            std::vector<NormalizedQos> group;
            for (int c = 0; c < n_comm; ++c) {
                group.clear();
                double acc = 0.0;
                for (int i : members[c]) {
                    group.push_back(norm[i]);
                    acc += netc[i];
                }
                comm_norm[c] = mean_normalized(group);
                comm_netc[c] = members[c].empty() ? 0.0 : acc / members[c].size();
            }
        } else {
            comm_norm = norm;
            comm_netc = netc;
        }
        res.qos_trace.push_back({epoch, sample[0], netc[0]});

        // Leader observation of every non-frozen node.
        for (int i = 0; i < n; ++i) {
            if (monitored(nodes[i].lc)) {
                nodes[i].obs = observe_behavior(specs[i].true_behavior, sample[channel_of(i)],
                                                ctx.trust.n_obs, ctx.trust.noise_amplitude, rng);
            } else {
                nodes[i].obs.reset();
            }
        }

        // Recommendation exchange among participating community members.
        for (int i = 0; i < n; ++i) {
            rec_about[i].clear();
            rec_given[i].clear();
        }
        for (int c = 0; c < n_comm; ++c) {
            std::vector<int> parts;
            for (int i : members[c]) {
                if (participates(nodes[i].lc)) parts.push_back(i);
            }
            for (int e : parts) {
                for (int t : parts) {
                    if (t == e) continue;
                    double value;
                    if (specs[e].role == Role::BadMouther) {
                        if (ctx.sim.collusion && specs[t].role != Role::Honest) {
                            value = 1.0;  // colluding cover for a fellow attacker
                        } else {
                            value = rng.uniform(0.0, 0.2);
                        }
                    } else {
                        // Truthful: a fresh probe-based estimate of the
                        // target's cooperation over the shared channel.
                        const double p = specs[t].true_behavior.cooperation *
                                         (1.0 - sample[channel_of(t)].packet_loss);
                        int hits = 0;
                        for (int k = 0; k < ctx.trust.n_obs; ++k) hits += rng.bernoulli(p);
                        value = static_cast<double>(hits) / ctx.trust.n_obs;
                    }
                    rec_about[t].push_back({value, nodes[e].trust});
                    if (nodes[t].obs) rec_given[e].push_back({value, nodes[t].obs->cooperation});
                }
            }
        }

        // Scores: leader-observed indicators, peer feedback as the indirect
        // term, and the recommender's own credibility as a persistent factor.
        for (int i = 0; i < n; ++i) {
            NodeRt& nd = nodes[i];
            if (!monitored(nd.lc)) continue;
            if (!rec_given[i].empty()) nd.last_penalty = recommendation_penalty(rec_given[i]);
            if (!nd.obs) continue;
            const double indirect = aggregate_indirect(rec_about[i], ctx.trust.untrusted_threshold);
            const BehaviorIndicators ind{nd.obs->cooperation, nd.obs->direct_honesty, indirect};
            nd.score = nd.last_penalty * behavior_score(ind, ctx.trust);
        }

        // Boost decision per community; draws nothing from the rng so the
        // baseline and boosted draw sequences stay aligned.
        for (int c = 0; c < n_comm; ++c) {
            if (mode == Mode::Tca) {
                FeatureVector f{comm_norm[c].snr_n, comm_norm[c].pl_n,   comm_norm[c].j_n,
                                comm_norm[c].l_n,  comm_norm[c].t_n,     comm_norm[c].sinr_n,
                                comm_netc[c],      0.5 /* admission trust */, 0.9 /* honest score */};
                const ConvergencePrediction pred = predictor.predict(f, comm_netc[c]);
                comm_pc[c] = pred.pc;
                comm_bf[c] = boost_factor(comm_netc[c], pred, ctx.boost);
            } else {
                comm_pc[c] = 0;
                comm_bf[c] = 1.0;
            }
            res.diagnostics.push_back({epoch, c, comm_netc[c], static_cast<double>(comm_pc[c]),
                                       comm_bf[c]});
        }

        // Markov step for every monitored node with evidence this epoch.
        for (int i = 0; i < n; ++i) {
            NodeRt& nd = nodes[i];
            if (monitored(nd.lc) && nd.obs) {
                const TransitionProbs probs = transition_probs(
                    nd.score, netc[channel_of(i)], comm_bf[specs[i].community_id], ctx.trust);
                nd.trust = step_trust(nd.trust, probs, rng);
            }
            traces[i].push_back(nd.trust);
        }

        // Graduated response policy.
        for (int i = 0; i < n; ++i) {
            NodeRt& nd = nodes[i];
            const PolicyStep step = evaluate_policy(nd.lc, nd.trust, ctx.policy);
            if (step.alert) {
                const Alert alert{epoch, specs[i].community_id, i, nd.trust.value()};
                res.alerts.push_back(alert);
                server.propagate_alert(alert);
            }
            nd.lc = step.next;
            res.trajectories.push_back({epoch, i, nd.trust});
        }
    }

    const std::string profile_label = to_string(condition_at(ctx.sim.schedule, 1));
    for (int i = 0; i < n; ++i) {
        const bool malicious = specs[i].role != Role::Honest;
        ConvergenceRecord rec;
        rec.seed = seed;
        rec.node_id = i;
        rec.role = specs[i].role;
        rec.profile = profile_label;
        rec.mode = mode;
        rec.convergence_epoch = detect_convergence(traces[i], malicious, ctx.trust, ctx.sim.k_stable);
        rec.final_state = nodes[i].trust;
        res.records.push_back(std::move(rec));
    }
    return res;
}

GroupSummary summarize(std::span<const ConvergenceRecord> records, const std::string& group_key,
                       Mode mode, const TrustParams& trust) {
    GroupSummary g;
    g.group_key = group_key;
    g.mode = mode;

    double sum = 0.0;
    long correct = 0;
    long total = 0;
    std::vector<double> cts;
    for (const ConvergenceRecord& r : records) {
        ++total;
        const bool malicious = r.role != Role::Honest;
        const bool classified = malicious ? r.final_state.value() <= trust.untrusted_threshold
                                          : r.final_state.value() >= trust.trusted_threshold;
        correct += classified;
        if (malicious) continue;  // convergence statistics cover honest nodes only
        if (r.convergence_epoch) {
            cts.push_back(static_cast<double>(*r.convergence_epoch));
            sum += *r.convergence_epoch;
        } else {
            ++g.n_censored;
        }
    }
    g.n = static_cast<long>(cts.size());
    if (g.n > 0) {
        g.mean_ct = sum / g.n;
        double ss = 0.0;
        for (double ct : cts) ss += (ct - g.mean_ct) * (ct - g.mean_ct);
        g.std_ct = g.n > 1 ? std::sqrt(ss / (g.n - 1)) : 0.0;
        g.ci95_half = 1.96 * g.std_ct / std::sqrt(static_cast<double>(g.n));
    }
    g.classification_accuracy = total > 0 ? static_cast<double>(correct) / total : 0.0;
    return g;
}

namespace {

struct SweepGroup {
    std::string key;
    SimParams params;
};

// Shared driver for the three experiment families: every (group, mode) cell
// runs the same seed list; diagnostics and alerts are captured from the
// first boosted run of the last group as a representative trace.
ExperimentResult run_sweep(const SimContext& ctx, const Predictor& predictor,
                           const std::vector<SweepGroup>& groups, int seeds, std::uint64_t seed0,
                           bool record_timings) {
    if (seeds < 1) throw std::invalid_argument("seed count must be positive");
    ExperimentResult out;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        for (const Mode mode : {Mode::Baseline, Mode::Tca}) {
            SimContext run_ctx = ctx;
            run_ctx.sim = groups[gi].params;
            std::vector<ConvergenceRecord> group_records;
            const auto t0 = std::chrono::steady_clock::now();
            for (int s = 0; s < seeds; ++s) {
                RunResult r = run_simulation(run_ctx, mode, predictor, seed0 + s);
                if (s == 0 && mode == Mode::Tca && gi + 1 == groups.size()) {
                    out.diagnostics = std::move(r.diagnostics);
                    out.alerts = std::move(r.alerts);
                    out.qos_trace = std::move(r.qos_trace);
                }
                group_records.insert(group_records.end(), r.records.begin(), r.records.end());
            }
            const auto t1 = std::chrono::steady_clock::now();
            if (record_timings) {
                out.timings.push_back(
                    {groups[gi].key, mode, seeds,
                     std::chrono::duration<double>(t1 - t0).count()});
            }
            out.summary.push_back(summarize(group_records, groups[gi].key, mode, ctx.trust));
            out.records.insert(out.records.end(), group_records.begin(), group_records.end());
        }
    }
    return out;
}

std::string fmt_key(const char* prefix, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.1f", prefix, v);
    return buf;
}

}  // namespace

ExperimentResult experiment_convergence(const SimContext& ctx, const Predictor& predictor,
                                        int seeds, std::uint64_t seed0) {
    std::vector<SweepGroup> groups;
    for (const Condition cond : {Condition::Good, Condition::Medium, Condition::Poor}) {
        SimParams p = ctx.sim;
        p.p_m = 0.0;
        p.schedule = {{0, cond}};
        groups.push_back({std::string("profile=") + to_string(cond), p});
    }
    return run_sweep(ctx, predictor, groups, seeds, seed0, false);
}

ExperimentResult experiment_badmouthing(const SimContext& ctx, const Predictor& predictor,
                                        int seeds, std::uint64_t seed0) {
    std::vector<SweepGroup> groups;
    for (const double pm : {0.2, 0.3, 0.4, 0.5}) {
        SimParams p = ctx.sim;
        p.p_m = pm;
        p.malicious_role = Role::BadMouther;
        // Long horizon: the final-epoch classification must be read well
        // after both populations settle, not right at the convergence knee.
        p.epochs_cap = std::max(p.epochs_cap, 6 * ctx.boost.max_t);
        groups.push_back({fmt_key("pm=", pm), p});
    }
    return run_sweep(ctx, predictor, groups, seeds, seed0, false);
}

ExperimentResult experiment_scalability(const SimContext& ctx, const Predictor& predictor,
                                        int seeds, std::uint64_t seed0) {
    std::vector<SweepGroup> groups;
    for (const int n : {50, 100, 150, 200, 250}) {
        SimParams p = ctx.sim;
        p.n_nodes = n;
        groups.push_back({"n=" + std::to_string(n), p});
    }
    return run_sweep(ctx, predictor, groups, seeds, seed0, true);
}

void CalibrateParams::validate() const {
    if (q_floor_grid.empty() || poor_center_grid.empty()) {
        throw std::invalid_argument("calibration grids must not be empty");
    }
    if (runs < 1) throw std::invalid_argument("calibration runs must be positive");
    for (double q : q_floor_grid) {
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q_floor grid value outside [0, 1]");
    }
    for (double c : poor_center_grid) {
        if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("poor center outside (0, 1)");
    }
}

namespace {

// Mean convergence epoch over seeded single-node honest baseline episodes,
// the unit the calibration bands are defined over (same episode process as
// the training-set generator).
double episode_mean_ct(const SimContext& ctx, Condition cond, int runs, Rng& rng) {
    const BehaviorIndicators truth{0.95, 0.95, 0.95};
    double sum = 0.0;
    long n = 0;
    for (int r = 0; r < runs; ++r) {
        const Episode ep =
            run_episode(ctx, cond, ctx.sim.initial_trust, truth, ctx.sim.epochs_cap, rng);
        const auto ct = detect_convergence(ep.trace, false, ctx.trust, ctx.sim.k_stable);
        if (ct) {
            sum += *ct;
            ++n;
        }
    }
    return n > 0 ? sum / n : std::numeric_limits<double>::infinity();
}

}  // namespace

CalibrateResult calibrate(const SimContext& ctx, const CalibrateParams& params,
                          std::uint64_t seed0) {
    params.validate();
    CalibrateResult result;
    std::uint64_t stream = 0;
    // Band-centre distance in half-width units; the selected point maximises
    // the margin against both bands so the choice survives reseeding.
    const double good_mid = 0.5 * (params.good_lo + params.good_hi);
    const double good_half = std::max(0.5 * (params.good_hi - params.good_lo), 1e-9);
    const double poor_mid = 0.5 * (params.poor_lo + params.poor_hi);
    const double poor_half = std::max(0.5 * (params.poor_hi - params.poor_lo), 1e-9);
    double best_dist = std::numeric_limits<double>::infinity();
    for (const double q_floor : params.q_floor_grid) {
        for (const double center : params.poor_center_grid) {
            SimContext probe = ctx;
            probe.trust.q_floor = q_floor;
            probe.poor =
                profile_from_center("Poor", center, 0.1, ctx.bounds, ctx.poor.ar_coefficient);
            Rng rng(Rng::derive(seed0, stream++));

            CalibratePoint point;
            point.q_floor = q_floor;
            point.poor_center = center;
            point.good_mean = episode_mean_ct(probe, Condition::Good, params.runs, rng);
            point.poor_mean = episode_mean_ct(probe, Condition::Poor, params.runs, rng);
            point.feasible = point.good_mean >= params.good_lo &&
                             point.good_mean <= params.good_hi &&
                             point.poor_mean >= params.poor_lo && point.poor_mean <= params.poor_hi;
            if (point.feasible) {
                const double dg = (point.good_mean - good_mid) / good_half;
                const double dp = (point.poor_mean - poor_mid) / poor_half;
                const double dist = dg * dg + dp * dp;
                if (dist < best_dist) {
                    best_dist = dist;
                    result.feasible = true;
                    result.q_floor = q_floor;
                    result.poor_center = center;
                }
            }
            result.report.push_back(point);
        }
    }
    return result;
}

}  // namespace tcasim

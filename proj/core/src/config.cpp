#include "tcasim/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tcasim {

using nlohmann::json;

void RunParams::validate() const {
    if (seeds < 1) throw std::invalid_argument("run.seeds must be positive");
}

SimContext Config::context() const {
    return SimContext{bounds, weights, good, medium, poor, trust, boost, policy, sim};
}

void Config::validate() const {
    bounds.validate();
    weights.validate();
    good.validate(bounds);
    medium.validate(bounds);
    poor.validate(bounds);
    trust.validate();
    boost.validate();
    policy.validate();
    forest.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("train_fraction must be in (0, 1)");
    }
    dataset.validate();
    sim.validate();
    run.validate();
    calibrate.validate();
}

Config default_config() {
    Config cfg;
    cfg.good = default_profile(Condition::Good, cfg.bounds);
    cfg.medium = default_profile(Condition::Medium, cfg.bounds);
    cfg.poor = default_profile(Condition::Poor, cfg.bounds);
    return cfg;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config key '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known) fail(join(path, item.key()), "unknown key");
    }
}

double get_number(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
}

int get_int(const json& j, const std::string& path, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    return v.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path, const char* key,
                      std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer()) fail(join(path, key), "expected an integer");
    if (v.is_number_integer() && v.get<long long>() < 0) fail(join(path, key), "must be nonnegative");
    return v.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) fail(join(path, key), "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

MetricRange get_range(const json& j, const std::string& path, const char* key,
                      MetricRange fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(join(path, key), "expected [low, high]");
    }
    return MetricRange{v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> get_number_list(const json& j, const std::string& path, const char* key,
                                    std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) fail(join(path, key), "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) fail(join(path, key), "expected a non-empty array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void parse_bounds(const json& j, NormalizationBounds& b) {
    const std::string path = "bounds";
    check_keys(j, path,
               {"snr_db", "packet_loss", "jitter_ms", "latency_ms", "throughput_mbps", "sinr_db"});
    b.snr_db = get_range(j, path, "snr_db", b.snr_db);
    b.packet_loss = get_range(j, path, "packet_loss", b.packet_loss);
    b.jitter_ms = get_range(j, path, "jitter_ms", b.jitter_ms);
    b.latency_ms = get_range(j, path, "latency_ms", b.latency_ms);
    b.throughput_mbps = get_range(j, path, "throughput_mbps", b.throughput_mbps);
    b.sinr_db = get_range(j, path, "sinr_db", b.sinr_db);
}

void parse_weights(const json& j, NetCWeights& w) {
    const std::string path = "weights";
    check_keys(j, path, {"alpha", "beta", "gamma", "delta", "tau", "sigma"});
    w.alpha = get_number(j, path, "alpha", w.alpha);
    w.beta = get_number(j, path, "beta", w.beta);
    w.gamma = get_number(j, path, "gamma", w.gamma);
    w.delta = get_number(j, path, "delta", w.delta);
    w.tau = get_number(j, path, "tau", w.tau);
    w.sigma = get_number(j, path, "sigma", w.sigma);
}

void parse_profile(const json& j, const std::string& path, const NormalizationBounds& bounds,
                   double default_width, NetworkProfile& p) {
    check_keys(j, path,
               {"center", "width", "ar_coefficient", "snr_db", "packet_loss", "jitter_ms",
                "latency_ms", "throughput_mbps", "sinr_db"});
    const double ar = get_number(j, path, "ar_coefficient", p.ar_coefficient);
    if (j.contains("center")) {
        const double center = get_number(j, path, "center", 0.0);
        const double width = get_number(j, path, "width", default_width);
        if (!(center > 0.0 && center < 1.0)) fail(join(path, "center"), "must be in (0, 1)");
        if (!(width > 0.0 && center - width >= 0.0 && center + width <= 1.0)) {
            fail(join(path, "width"), "band must stay inside [0, 1]");
        }
        p = profile_from_center(p.name, center, width, bounds, ar);
    } else if (j.contains("width")) {
        fail(join(path, "width"), "width requires center");
    }
    p.ar_coefficient = ar;
    p.snr_db = get_range(j, path, "snr_db", p.snr_db);
    p.packet_loss = get_range(j, path, "packet_loss", p.packet_loss);
    p.jitter_ms = get_range(j, path, "jitter_ms", p.jitter_ms);
    p.latency_ms = get_range(j, path, "latency_ms", p.latency_ms);
    p.throughput_mbps = get_range(j, path, "throughput_mbps", p.throughput_mbps);
    p.sinr_db = get_range(j, path, "sinr_db", p.sinr_db);
}

void parse_trust(const json& j, TrustParams& t) {
    const std::string path = "trust";
    check_keys(j, path,
               {"w_cooperation", "w_direct", "w_indirect", "theta_up", "n_obs", "q_floor",
                "trusted_threshold", "untrusted_threshold", "noise_amplitude", "misread_rate"});
    t.w_cooperation = get_number(j, path, "w_cooperation", t.w_cooperation);
    t.w_direct = get_number(j, path, "w_direct", t.w_direct);
    t.w_indirect = get_number(j, path, "w_indirect", t.w_indirect);
    t.theta_up = get_number(j, path, "theta_up", t.theta_up);
    t.n_obs = get_int(j, path, "n_obs", t.n_obs);
    t.q_floor = get_number(j, path, "q_floor", t.q_floor);
    t.trusted_threshold = get_number(j, path, "trusted_threshold", t.trusted_threshold);
    t.untrusted_threshold = get_number(j, path, "untrusted_threshold", t.untrusted_threshold);
    t.noise_amplitude = get_number(j, path, "noise_amplitude", t.noise_amplitude);
    t.misread_rate = get_number(j, path, "misread_rate", t.misread_rate);
}

void parse_boost(const json& j, BoostParams& b) {
    const std::string path = "boost";
    check_keys(j, path, {"lambda", "netc_cutoff", "max_t"});
    b.lambda = get_number(j, path, "lambda", b.lambda);
    b.netc_cutoff = get_number(j, path, "netc_cutoff", b.netc_cutoff);
    b.max_t = get_int(j, path, "max_t", b.max_t);
}

void parse_policy(const json& j, PolicyParams& p) {
    const std::string path = "policy";
    check_keys(j, path,
               {"isolate_threshold", "reintegrate_threshold", "quarantine_window",
                "probation_length"});
    p.isolate_threshold = get_number(j, path, "isolate_threshold", p.isolate_threshold);
    p.reintegrate_threshold = get_number(j, path, "reintegrate_threshold", p.reintegrate_threshold);
    p.quarantine_window = get_int(j, path, "quarantine_window", p.quarantine_window);
    p.probation_length = get_int(j, path, "probation_length", p.probation_length);
}

void parse_forest(const json& j, ForestHyperparams& f) {
    const std::string path = "forest";
    check_keys(j, path, {"n_trees", "max_depth", "min_leaf", "features_per_split"});
    f.n_trees = get_int(j, path, "n_trees", f.n_trees);
    f.max_depth = get_int(j, path, "max_depth", f.max_depth);
    f.min_leaf = get_int(j, path, "min_leaf", f.min_leaf);
    f.features_per_split = get_int(j, path, "features_per_split", f.features_per_split);
}

void parse_dataset(const json& j, DatasetParams& d) {
    const std::string path = "dataset";
    check_keys(j, path, {"n_examples", "epochs_cap", "behavior_lo", "behavior_hi"});
    d.n_examples = get_int(j, path, "n_examples", d.n_examples);
    d.epochs_cap = get_int(j, path, "epochs_cap", d.epochs_cap);
    d.behavior_lo = get_number(j, path, "behavior_lo", d.behavior_lo);
    d.behavior_hi = get_number(j, path, "behavior_hi", d.behavior_hi);
}

void parse_sim(const json& j, SimParams& s) {
    const std::string path = "sim";
    check_keys(j, path,
               {"n_nodes", "community_size", "p_m", "malicious_role", "collusion",
                "per_node_channel", "epochs_cap", "k_stable", "initial_trust", "profile",
                "schedule"});
    s.n_nodes = get_int(j, path, "n_nodes", s.n_nodes);
    s.community_size = get_int(j, path, "community_size", s.community_size);
    s.p_m = get_number(j, path, "p_m", s.p_m);
    if (!(s.p_m >= 0.0 && s.p_m < 1.0)) fail("sim.p_m", "must be in [0, 1)");
    if (j.contains("malicious_role")) {
        const std::string role = get_string(j, path, "malicious_role", "");
        const auto parsed = role_from_string(role);
        if (!parsed) fail("sim.malicious_role", "expected honest, bad_mouther or non_cooperative");
        s.malicious_role = *parsed;
    }
    s.collusion = get_bool(j, path, "collusion", s.collusion);
    s.per_node_channel = get_bool(j, path, "per_node_channel", s.per_node_channel);
    s.epochs_cap = get_int(j, path, "epochs_cap", s.epochs_cap);
    s.k_stable = get_int(j, path, "k_stable", s.k_stable);
    if (j.contains("initial_trust")) {
        try {
            s.initial_trust = trust_state_from_value(get_number(j, path, "initial_trust", 0.5));
        } catch (const std::invalid_argument&) {
            fail("sim.initial_trust", "must be one of the grid values 0.0, 0.1, ..., 1.0");
        }
    }
    if (j.contains("profile") && j.contains("schedule")) {
        fail("sim.schedule", "give either profile or schedule, not both");
    }
    if (j.contains("profile")) {
        const auto cond = condition_from_string(get_string(j, path, "profile", ""));
        if (!cond) fail("sim.profile", "expected Good, Medium or Poor");
        s.schedule = {{0, *cond}};
    }
    if (j.contains("schedule")) {
        const json& arr = j.at("schedule");
        if (!arr.is_array() || arr.empty()) fail("sim.schedule", "expected a non-empty array");
        s.schedule.clear();
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string epath = "sim.schedule[" + std::to_string(k) + "]";
            check_keys(arr[k], epath, {"epoch", "profile"});
            SchedulePoint pt;
            pt.epoch = get_int(arr[k], epath, "epoch", 0);
            const auto cond = condition_from_string(get_string(arr[k], epath, "profile", ""));
            if (!cond) fail(epath + ".profile", "expected Good, Medium or Poor");
            pt.profile = *cond;
            s.schedule.push_back(pt);
        }
    }
}

void parse_run(const json& j, RunParams& r) {
    const std::string path = "run";
    check_keys(j, path, {"seeds", "seed0", "mode"});
    r.seeds = get_int(j, path, "seeds", r.seeds);
    r.seed0 = get_u64(j, path, "seed0", r.seed0);
    if (j.contains("mode")) {
        const auto mode = mode_from_string(get_string(j, path, "mode", ""));
        if (!mode) fail("run.mode", "expected baseline or tca");
        r.mode = *mode;
    }
}

void parse_calibrate(const json& j, CalibrateParams& c) {
    const std::string path = "calibrate";
    check_keys(j, path, {"q_floor_grid", "poor_center_grid", "good_band", "poor_band", "runs"});
    c.q_floor_grid = get_number_list(j, path, "q_floor_grid", c.q_floor_grid);
    c.poor_center_grid = get_number_list(j, path, "poor_center_grid", c.poor_center_grid);
    const MetricRange good = get_range(j, path, "good_band", {c.good_lo, c.good_hi});
    const MetricRange poor = get_range(j, path, "poor_band", {c.poor_lo, c.poor_hi});
    c.good_lo = good.lo;
    c.good_hi = good.hi;
    c.poor_lo = poor.lo;
    c.poor_hi = poor.hi;
    c.runs = get_int(j, path, "runs", c.runs);
}

}  // namespace

Config parse_config(const std::string& text) {
    Config cfg = default_config();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        cfg.validate();
        return cfg;
    }

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "",
               {"bounds", "weights", "profiles", "trust", "boost", "policy", "forest",
                "train_fraction", "dataset", "sim", "run", "calibrate"});

    if (j.contains("bounds")) parse_bounds(j.at("bounds"), cfg.bounds);
    if (j.contains("weights")) parse_weights(j.at("weights"), cfg.weights);
    if (j.contains("profiles")) {
        const json& p = j.at("profiles");
        check_keys(p, "profiles", {"good", "medium", "poor"});
        if (p.contains("good")) parse_profile(p.at("good"), "profiles.good", cfg.bounds, 0.05, cfg.good);
        if (p.contains("medium")) {
            parse_profile(p.at("medium"), "profiles.medium", cfg.bounds, 0.1, cfg.medium);
        }
        if (p.contains("poor")) parse_profile(p.at("poor"), "profiles.poor", cfg.bounds, 0.1, cfg.poor);
    }
    if (j.contains("trust")) parse_trust(j.at("trust"), cfg.trust);
    if (j.contains("boost")) parse_boost(j.at("boost"), cfg.boost);
    if (j.contains("policy")) parse_policy(j.at("policy"), cfg.policy);
    if (j.contains("forest")) parse_forest(j.at("forest"), cfg.forest);
    if (j.contains("train_fraction")) {
        cfg.train_fraction = get_number(j, "", "train_fraction", cfg.train_fraction);
    }
    if (j.contains("dataset")) parse_dataset(j.at("dataset"), cfg.dataset);
    if (j.contains("sim")) parse_sim(j.at("sim"), cfg.sim);
    if (j.contains("run")) parse_run(j.at("run"), cfg.run);
    if (j.contains("calibrate")) parse_calibrate(j.at("calibrate"), cfg.calibrate);

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

Config load_config(const std::string& path) {
    return parse_config(read_file(path));
}

std::string config_hash_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace tcasim

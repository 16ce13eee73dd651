#include "tcasim/csv.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tcasim {

using nlohmann::json;

std::string fmt_double(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

}  // namespace

void write_records_csv(const std::string& path, std::span<const ConvergenceRecord> records) {
    std::ofstream out = open_out(path);
    out << "seed,node_id,role,profile,mode,convergence_epoch,final_state\n";
    for (const ConvergenceRecord& r : records) {
        out << r.seed << ',' << r.node_id << ',' << to_string(r.role) << ',' << r.profile << ','
            << to_string(r.mode) << ',';
        if (r.convergence_epoch) out << *r.convergence_epoch;
        out << ',' << fmt_double(r.final_state.value(), 1) << '\n';
    }
}

void write_summary_csv(const std::string& path, std::span<const GroupSummary> summary) {
    std::ofstream out = open_out(path);
    out << "group_key,mode,mean_ct,std_ct,n,classification_accuracy\n";
    for (const GroupSummary& s : summary) {
        out << s.group_key << ',' << to_string(s.mode) << ',';
        if (s.n > 0) out << fmt_double(s.mean_ct, 4);
        out << ',';
        if (s.n > 0) out << fmt_double(s.std_ct, 4);
        out << ',' << s.n << ',' << fmt_double(s.classification_accuracy, 4) << '\n';
    }
}

void write_diagnostics_csv(const std::string& path, std::span<const DiagnosticsRow> rows) {
    std::ofstream out = open_out(path);
    out << "epoch,community,netc,pc,bf\n";
    for (const DiagnosticsRow& d : rows) {
        out << d.epoch << ',' << d.community << ',' << fmt_double(d.netc, 6) << ','
            << fmt_double(d.pc_mean, 2) << ',' << fmt_double(d.bf_mean, 6) << '\n';
    }
}

void write_alerts_csv(const std::string& path, std::span<const Alert> alerts) {
    std::ofstream out = open_out(path);
    out << "epoch,community,node_id,trust_at_isolation\n";
    for (const Alert& a : alerts) {
        out << a.epoch << ',' << a.community << ',' << a.node_id << ','
            << fmt_double(a.trust_at_isolation, 1) << '\n';
    }
}

void write_qos_trace_csv(const std::string& path, std::span<const QosTraceRow> rows) {
    std::ofstream out = open_out(path);
    out << "epoch,snr_db,pl_frac,jitter_ms,latency_ms,throughput_mbps,sinr_db,netc\n";
    for (const QosTraceRow& q : rows) {
        out << q.epoch << ',' << fmt_double(q.sample.snr_db, 4) << ','
            << fmt_double(q.sample.packet_loss, 4) << ',' << fmt_double(q.sample.jitter_ms, 4)
            << ',' << fmt_double(q.sample.latency_ms, 4) << ','
            << fmt_double(q.sample.throughput_mbps, 4) << ',' << fmt_double(q.sample.sinr_db, 4)
            << ',' << fmt_double(q.netc, 6) << '\n';
    }
}

void write_trajectories_csv(const std::string& path, std::span<const TrajectoryRow> rows) {
    std::ofstream out = open_out(path);
    out << "epoch,node_id,trust\n";
    for (const TrajectoryRow& t : rows) {
        out << t.epoch << ',' << t.node_id << ',' << fmt_double(t.state.value(), 1) << '\n';
    }
}

void write_timings_csv(const std::string& path, std::span<const TimingRow> rows) {
    std::ofstream out = open_out(path);
    out << "group_key,mode,runs,seconds_total\n";
    for (const TimingRow& t : rows) {
        out << t.group_key << ',' << to_string(t.mode) << ',' << t.runs << ','
            << fmt_double(t.seconds_total, 6) << '\n';
    }
}

std::string render_summary_table(std::span<const GroupSummary> summary) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %-9s %9s %8s %8s %6s %9s %9s\n", "group", "mode",
                  "mean_ct", "std_ct", "ci95", "n", "censored", "accuracy");
    out << line;
    out << std::string(78, '-') << '\n';
    for (const GroupSummary& s : summary) {
        if (s.n > 0) {
            std::snprintf(line, sizeof line, "%-14s %-9s %9.3f %8.3f %8.3f %6ld %9ld %9.4f\n",
                          s.group_key.c_str(), to_string(s.mode), s.mean_ct, s.std_ct, s.ci95_half,
                          s.n, s.n_censored, s.classification_accuracy);
        } else {
            std::snprintf(line, sizeof line, "%-14s %-9s %9s %8s %8s %6ld %9ld %9.4f\n",
                          s.group_key.c_str(), to_string(s.mode), "-", "-", "-", s.n, s.n_censored,
                          s.classification_accuracy);
        }
        out << line;
    }
    return out.str();
}

void write_manifest(const std::string& path, const RunManifest& m) {
    json j;
    j["tool"] = m.tool;
    j["version"] = m.version;
    j["subcommand"] = m.subcommand;
    j["config_path"] = m.config_path;
    j["config_hash"] = m.config_hash;
    j["model_path"] = m.model_path;
    j["mode"] = m.mode;
    j["seeds"] = m.seeds;
    j["out_dir"] = m.out_dir;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read manifest: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("manifest is not valid JSON: " + std::string(e.what()));
    }
    RunManifest m;
    try {
        m.tool = j.at("tool").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.subcommand = j.at("subcommand").get<std::string>();
        m.config_path = j.at("config_path").get<std::string>();
        m.config_hash = j.at("config_hash").get<std::string>();
        m.model_path = j.at("model_path").get<std::string>();
        m.mode = j.at("mode").get<std::string>();
        m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        m.out_dir = j.at("out_dir").get<std::string>();
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
    } catch (const json::exception& e) {
        throw std::runtime_error("manifest missing field: " + std::string(e.what()));
    }
    return m;
}

std::string utc_timestamp_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace tcasim

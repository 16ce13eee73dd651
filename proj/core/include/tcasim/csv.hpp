#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcasim/sim.hpp"

namespace tcasim {

/// Fixed-precision decimal formatting; CSV output must be byte-stable for
/// a given build, so all floats go through this instead of iostreams state.
std::string fmt_double(double v, int precision);

// Writers for the stable CSV schemas. Headers are part of the tool's
// contract and never change between runs.
void write_records_csv(const std::string& path, std::span<const ConvergenceRecord> records);
void write_summary_csv(const std::string& path, std::span<const GroupSummary> summary);
void write_diagnostics_csv(const std::string& path, std::span<const DiagnosticsRow> rows);
void write_alerts_csv(const std::string& path, std::span<const Alert> alerts);
void write_qos_trace_csv(const std::string& path, std::span<const QosTraceRow> rows);
void write_trajectories_csv(const std::string& path, std::span<const TrajectoryRow> rows);
void write_timings_csv(const std::string& path, std::span<const TimingRow> rows);

/// Human-readable summary table (also carries the confidence half-width and
/// censored counts, which the summary CSV schema does not include).
std::string render_summary_table(std::span<const GroupSummary> summary);

/// Run provenance written to <out>/manifest.json before any other output.
struct RunManifest {
    std::string tool = "tcasim";
    std::string version;
    std::string subcommand;
    std::string config_path;  // empty when running on pure defaults
    std::string config_hash;
    std::string model_path;  // trained model actually loaded, empty when none
    std::string mode;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    std::string started_at;
    std::string finished_at;  // empty until the run completes
};

void write_manifest(const std::string& path, const RunManifest& m);
RunManifest read_manifest(const std::string& path);

/// ISO-8601 UTC timestamp for manifests.
std::string utc_timestamp_now();

}  // namespace tcasim

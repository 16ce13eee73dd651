#pragma once

#include <array>
#include <optional>
#include <string>

#include "tcasim/rng.hpp"

namespace tcasim {

/// Raw link measurements for one evaluation epoch.
struct QosSample {
    double snr_db = 0.0;
    double packet_loss = 0.0;   // fraction in [0, 1]
    double jitter_ms = 0.0;
    double latency_ms = 0.0;
    double throughput_mbps = 0.0;
    double sinr_db = 0.0;
};

/// Per-metric [0,1] scaling of a QosSample. Loss, jitter and latency keep
/// their raw orientation here; the complement is taken inside compute_netc.
struct NormalizedQos {
    double snr_n = 0.0;
    double pl_n = 0.0;
    double j_n = 0.0;
    double l_n = 0.0;
    double t_n = 0.0;
    double sinr_n = 0.0;
};

struct MetricRange {
    double lo = 0.0;
    double hi = 1.0;
};

/// Min/max used for normalization, fixed once per deployment so that netC
/// values are comparable across communities and epochs.
struct NormalizationBounds {
    MetricRange snr_db{0.0, 40.0};
    MetricRange packet_loss{0.0, 0.20};
    MetricRange jitter_ms{0.0, 50.0};
    MetricRange latency_ms{0.0, 200.0};
    MetricRange throughput_mbps{0.0, 100.0};
    MetricRange sinr_db{0.0, 40.0};

    void validate() const;  // throws std::invalid_argument if any lo >= hi
};

/// Convex weights of the six netC terms; must sum to 1 within 1e-9.
struct NetCWeights {
    double alpha = 1.0 / 6.0;  // SNR
    double beta = 1.0 / 6.0;   // packet loss (complement)
    double gamma = 1.0 / 6.0;  // jitter (complement)
    double delta = 1.0 / 6.0;  // latency (complement)
    double tau = 1.0 / 6.0;    // throughput
    double sigma = 1.0 / 6.0;  // SINR

    void validate() const;
};

enum class Condition { Good, Medium, Poor };

const char* to_string(Condition c);
std::optional<Condition> condition_from_string(const std::string& s);

/// Sampling ranges (native units) plus AR(1) smoothing coefficient for one
/// network condition regime.
struct NetworkProfile {
    std::string name;  // "Good", "Medium" or "Poor"
    MetricRange snr_db;
    MetricRange packet_loss;
    MetricRange jitter_ms;
    MetricRange latency_ms;
    MetricRange throughput_mbps;
    MetricRange sinr_db;
    double ar_coefficient = 0.8;

    /// Ranges must sit inside the given bounds and ar in [0, 1).
    void validate(const NormalizationBounds& bounds) const;
};

/// Clamped min-max scaling of every metric. Rejects non-finite inputs,
/// which signal corrupt trace data rather than a bad link.
NormalizedQos normalize(const QosSample& sample, const NormalizationBounds& bounds);

/// Composite network condition metric in [0, 1]. Higher is better; the
/// lower-is-better metrics (loss, jitter, latency) enter as complements.
double compute_netc(const NormalizedQos& q, const NetCWeights& w);

/// Draws one QosSample from the profile. With a previous sample, each metric
/// follows x_t = ar*x_{t-1} + (1-ar)*draw, clamped to the profile range;
/// without one the raw draw is returned. Always consumes six uniforms.
QosSample sample_profile(const NetworkProfile& profile, const std::optional<QosSample>& previous,
                         Rng& rng);

/// Good iff netC >= 0.8, Medium iff 0.5 <= netC < 0.8, Poor otherwise.
Condition classify_condition(double netc);

/// Construct a profile whose sampled netC (under the given bounds and equal
/// weights) is uniform-ish in [center - width, center + width]. Each
/// better-is-higher metric spans that band in normalized units; the
/// lower-is-better metrics span the mirrored band.
NetworkProfile profile_from_center(const std::string& name, double center, double width,
                                   const NormalizationBounds& bounds, double ar_coefficient = 0.8);

/// Defaults used by the shipped configuration: Good center 0.875 width 0.05,
/// Medium center 0.6 width 0.1, Poor center 0.3 width 0.1 (the Poor center
/// and trust.q_floor are the calibrated values). The Good band is
/// strictly above the 0.8 cutoff so boosting never engages there.
NetworkProfile default_profile(Condition c, const NormalizationBounds& bounds);

}  // namespace tcasim

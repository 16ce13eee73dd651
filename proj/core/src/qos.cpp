#include "tcasim/qos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcasim {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("non-finite ") + what);
    }
}

double scale(double v, const MetricRange& r, const char* what) {
    require_finite(v, what);
    return clamp01((v - r.lo) / (r.hi - r.lo));
}

void require_range(const MetricRange& r, const char* what) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo >= r.hi) {
        throw std::invalid_argument(std::string("invalid range for ") + what);
    }
}

// AR(1) update for one metric, clamped to the sampling range.
double ar_step(double prev, double draw, double ar, const MetricRange& range) {
    double v = ar * prev + (1.0 - ar) * draw;
    return std::clamp(v, range.lo, range.hi);
}

void require_inside(const MetricRange& inner, const MetricRange& outer, const char* what) {
    require_range(inner, what);
    if (inner.lo < outer.lo || inner.hi > outer.hi) {
        throw std::invalid_argument(std::string("profile range outside bounds for ") + what);
    }
}

}  // namespace

void NormalizationBounds::validate() const {
    require_range(snr_db, "snr_db");
    require_range(packet_loss, "packet_loss");
    require_range(jitter_ms, "jitter_ms");
    require_range(latency_ms, "latency_ms");
    require_range(throughput_mbps, "throughput_mbps");
    require_range(sinr_db, "sinr_db");
}

void NetCWeights::validate() const {
    const double sum = alpha + beta + gamma + delta + tau + sigma;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("netC weights must sum to 1");
    }
    for (double w : {alpha, beta, gamma, delta, tau, sigma}) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("netC weights must be non-negative");
        }
    }
}

const char* to_string(Condition c) {
    switch (c) {
        case Condition::Good: return "Good";
        case Condition::Medium: return "Medium";
        case Condition::Poor: return "Poor";
    }
    return "?";
}

std::optional<Condition> condition_from_string(const std::string& s) {
    if (s == "Good" || s == "good") return Condition::Good;
    if (s == "Medium" || s == "medium") return Condition::Medium;
    if (s == "Poor" || s == "poor") return Condition::Poor;
    return std::nullopt;
}

void NetworkProfile::validate(const NormalizationBounds& bounds) const {
    require_inside(snr_db, bounds.snr_db, "snr_db");
    require_inside(packet_loss, bounds.packet_loss, "packet_loss");
    require_inside(jitter_ms, bounds.jitter_ms, "jitter_ms");
    require_inside(latency_ms, bounds.latency_ms, "latency_ms");
    require_inside(throughput_mbps, bounds.throughput_mbps, "throughput_mbps");
    require_inside(sinr_db, bounds.sinr_db, "sinr_db");
    if (!(ar_coefficient >= 0.0) || ar_coefficient >= 1.0) {
        throw std::invalid_argument("ar_coefficient must be in [0, 1)");
    }
}

NormalizedQos normalize(const QosSample& s, const NormalizationBounds& b) {
    b.validate();
    NormalizedQos n;
    n.snr_n = scale(s.snr_db, b.snr_db, "snr_db");
    n.pl_n = scale(s.packet_loss, b.packet_loss, "packet_loss");
    n.j_n = scale(s.jitter_ms, b.jitter_ms, "jitter_ms");
    n.l_n = scale(s.latency_ms, b.latency_ms, "latency_ms");
    n.t_n = scale(s.throughput_mbps, b.throughput_mbps, "throughput_mbps");
    n.sinr_n = scale(s.sinr_db, b.sinr_db, "sinr_db");
    return n;
}

double compute_netc(const NormalizedQos& q, const NetCWeights& w) {
    w.validate();
    return w.alpha * q.snr_n + w.beta * (1.0 - q.pl_n) + w.gamma * (1.0 - q.j_n) +
           w.delta * (1.0 - q.l_n) + w.tau * q.t_n + w.sigma * q.sinr_n;
}

QosSample sample_profile(const NetworkProfile& p, const std::optional<QosSample>& previous,
                         Rng& rng) {
    QosSample draw;
    draw.snr_db = rng.uniform(p.snr_db.lo, p.snr_db.hi);
    draw.packet_loss = rng.uniform(p.packet_loss.lo, p.packet_loss.hi);
    draw.jitter_ms = rng.uniform(p.jitter_ms.lo, p.jitter_ms.hi);
    draw.latency_ms = rng.uniform(p.latency_ms.lo, p.latency_ms.hi);
    draw.throughput_mbps = rng.uniform(p.throughput_mbps.lo, p.throughput_mbps.hi);
    draw.sinr_db = rng.uniform(p.sinr_db.lo, p.sinr_db.hi);
    if (!previous) return draw;

    const QosSample& prev = *previous;
    const double ar = p.ar_coefficient;
    QosSample out;
    out.snr_db = ar_step(prev.snr_db, draw.snr_db, ar, p.snr_db);
    out.packet_loss = ar_step(prev.packet_loss, draw.packet_loss, ar, p.packet_loss);
    out.jitter_ms = ar_step(prev.jitter_ms, draw.jitter_ms, ar, p.jitter_ms);
    out.latency_ms = ar_step(prev.latency_ms, draw.latency_ms, ar, p.latency_ms);
    out.throughput_mbps = ar_step(prev.throughput_mbps, draw.throughput_mbps, ar, p.throughput_mbps);
    out.sinr_db = ar_step(prev.sinr_db, draw.sinr_db, ar, p.sinr_db);
    return out;
}

Condition classify_condition(double netc) {
    if (netc >= 0.8) return Condition::Good;
    if (netc >= 0.5) return Condition::Medium;
    return Condition::Poor;
}

NetworkProfile profile_from_center(const std::string& name, double center, double width,
                                   const NormalizationBounds& bounds, double ar_coefficient) {
    if (!(center > 0.0) || !(center < 1.0) || !(width > 0.0) || center - width < 0.0 ||
        center + width > 1.0) {
        throw std::invalid_argument("profile center/width outside (0, 1)");
    }
    auto span_up = [&](const MetricRange& b) {
        // better-is-higher metric: normalized band [center-width, center+width]
        return MetricRange{b.lo + (center - width) * (b.hi - b.lo),
                           b.lo + (center + width) * (b.hi - b.lo)};
    };
    auto span_down = [&](const MetricRange& b) {
        // lower-is-better metric: its complement must span the same band
        return MetricRange{b.lo + (1.0 - center - width) * (b.hi - b.lo),
                           b.lo + (1.0 - center + width) * (b.hi - b.lo)};
    };
    NetworkProfile p;
    p.name = name;
    p.snr_db = span_up(bounds.snr_db);
    p.packet_loss = span_down(bounds.packet_loss);
    p.jitter_ms = span_down(bounds.jitter_ms);
    p.latency_ms = span_down(bounds.latency_ms);
    p.throughput_mbps = span_up(bounds.throughput_mbps);
    p.sinr_db = span_up(bounds.sinr_db);
    p.ar_coefficient = ar_coefficient;
    p.validate(bounds);
    return p;
}

NetworkProfile default_profile(Condition c, const NormalizationBounds& bounds) {
    switch (c) {
        case Condition::Good:
            // strictly above the 0.8 cutoff: netC stays in [0.825, 0.925]
            return profile_from_center("Good", 0.875, 0.05, bounds);
        case Condition::Medium:
            return profile_from_center("Medium", 0.6, 0.1, bounds);
        case Condition::Poor:
            return profile_from_center("Poor", 0.3, 0.1, bounds);
    }
    throw std::invalid_argument("unknown condition");
}

}  // namespace tcasim

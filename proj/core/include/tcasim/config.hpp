#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "tcasim/dataset.hpp"
#include "tcasim/forest.hpp"
#include "tcasim/sim.hpp"

namespace tcasim {

/// Configuration problem with the offending key path in the message.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunParams {
    int seeds = 200;
    std::uint64_t seed0 = 1;
    Mode mode = Mode::Baseline;

    void validate() const;
};

/// Full tool configuration with the shipped defaults. The default Poor
/// profile center and trust.q_floor are the values selected by `calibrate`
/// under the default bands.
struct Config {
    NormalizationBounds bounds;
    NetCWeights weights;
    NetworkProfile good;
    NetworkProfile medium;
    NetworkProfile poor;
    TrustParams trust;
    BoostParams boost;
    PolicyParams policy;
    ForestHyperparams forest;
    double train_fraction = 0.8;
    DatasetParams dataset;
    SimParams sim;
    RunParams run;
    CalibrateParams calibrate;

    SimContext context() const;
    void validate() const;
};

Config default_config();

/// Parses a JSON config file. An empty (or whitespace-only) file yields the
/// full defaults; unknown keys and out-of-range values raise ConfigError
/// naming the key. Every key is optional and defaults as in default_config.
Config load_config(const std::string& path);
Config parse_config(const std::string& text);

/// FNV-1a 64-bit hash of the raw config bytes, hex-encoded; stable across
/// runs and platforms so a RunManifest pins the exact file it saw.
std::string config_hash_hex(const std::string& bytes);

/// Reads a whole file; throws ConfigError when it does not exist.
std::string read_file(const std::string& path);

}  // namespace tcasim

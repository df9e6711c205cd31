#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbtm/run.hpp"

namespace sbtm {

/// Invalid configuration; `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

struct TargetSpec {
    std::string kind = "gaussian";  // gaussian | mixture | noisy_circle | grid_mixture
    int dim = 1;
    // mixture
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<double> variances;
    // noisy_circle
    std::vector<double> center = {4.0, 0.0};
    double radius = 1.0;
    double temperature = 0.08;
    // grid_mixture
    int modes_per_side = 4;
    double spacing = 8.0;
    double variance = 1.0;

    bool operator==(const TargetSpec&) const = default;
};

struct InitialSpec {
    std::string kind = "gaussian";  // gaussian | analytic_gaussian
    double variance = 1.0;
    double time_offset = 0.1;  // analytic_gaussian: N(0, 1 - e^{-2 time_offset})

    bool operator==(const InitialSpec&) const = default;
};

struct ScheduleSpec {
    std::string kind = "none";
    double duration = 0.0;  // 0: the run's final time
    double t_min = 0.0;     // 0: dt

    bool operator==(const ScheduleSpec&) const = default;
};

/// Everything needed to reproduce one run. Serialized as YAML (schema version 1).
struct RunConfig {
    int version = 1;
    std::string name = "run";
    Method method = Method::sbtm;
    TargetSpec target;
    InitialSpec initial;
    std::int64_t n = 1000;
    double dt = 0.01;
    double total_time = 1.0;
    ScheduleSpec schedule;
    Architecture model;
    TrainingConfig training;
    int record_every = 10;
    int snapshot_every = 0;
    KlEstimator kl_estimator = KlEstimator::smoothed;
    double early_stop_fisher = 0.0;  // 0 disables
    double svgd_bandwidth = 0.0;     // 0: median rule
    std::uint64_t seed = 0;
    bool deterministic = true;
    std::string output = "runs/run";

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
std::string emit_config(const RunConfig& config);

/// Environment variables named SBTM_<KEY> override scalar keys, where KEY is the
/// dotted key path upper-cased with dots replaced by underscores
/// (SBTM_SEED, SBTM_DT, SBTM_TRAINING_LEARNING_RATE, SBTM_DIAGNOSTICS_RECORD_EVERY, ...).
/// Returns the names of the variables applied.
std::vector<std::string> apply_env_overrides(RunConfig& config,
                                             const std::function<std::optional<std::string>(const std::string&)>& getenv);
std::vector<std::string> apply_env_overrides(RunConfig& config);

/// Directory holding preset files: $SBTM_PRESET_DIR, else the in-repo presets/.
std::string preset_directory();
RunConfig load_preset(const std::string& name);

}  // namespace sbtm

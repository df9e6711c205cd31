#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbtm/diagnostics.hpp"
#include "sbtm/samplers.hpp"

namespace sbtm {

enum class Method { sbtm, sbtm_bypass, langevin, svgd };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct RunOptions {
    Method method = Method::sbtm;
    Eigen::Index n = 1000;
    SbtmConfig sbtm;  // dt, total time, training, seed, deterministic flag
    Architecture arch;
    int record_every = 10;
    int snapshot_every = 0;  // 0: only the first and last states
    std::optional<double> early_stop_fisher;
    KlOptions kl;
    BandwidthRule svgd_bandwidth;
    /// Closed-form f_t when known: enables l2_error and supplies the score for sbtm_bypass.
    std::optional<AnalyticSolution> analytic;
    /// Start from this network instead of a fresh Glorot initialization.
    std::optional<ScoreModel> initial_model;
};

struct Snapshot {
    int step = 0;
    double t = 0.0;
    Matrix positions;
};

/// What an observer sees at each record: the particles and the score field s(X) in use
/// (empty for methods without a learned score).
struct RecordContext {
    int step;
    const Ensemble& ensemble;
    const Matrix& learned_scores;
    const ScoreModel* model;
};

struct RunObserver {
    std::function<void(const DiagnosticsRecord&, const RecordContext&)> on_record;
    std::function<void(const Snapshot&)> on_snapshot;
};

struct RunResult {
    std::vector<DiagnosticsRecord> records;
    std::vector<Snapshot> snapshots;
    std::optional<PretrainReport> pretrain;
    std::optional<ScoreModel> model;
    Ensemble final_ensemble;
    int steps_taken = 0;
    bool early_stopped = false;
    double wall_seconds = 0.0;
};

/// Pretrains (sbtm only), then takes total_time / dt steps of the chosen method,
/// recording diagnostics every `record_every` steps. Step errors propagate after the
/// observer has seen every completed record.
RunResult run(const RunOptions& options, const TargetDensity& target, const InitialDensity& initial,
              const AnnealingSchedule& schedule, const RunObserver& observer = {});

}  // namespace sbtm

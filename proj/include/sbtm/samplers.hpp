#pragma once

#include <cstdint>
#include <optional>

#include "sbtm/annealing.hpp"
#include "sbtm/losses.hpp"
#include "sbtm/score_model.hpp"

namespace sbtm {

/// n particles in R^d (columns of `positions`) at simulation time `time`.
struct Ensemble {
    Matrix positions;
    double time = 0.0;
    Rng rng;

    Eigen::Index size() const { return positions.cols(); }
    int dim() const { return static_cast<int>(positions.rows()); }
};

Ensemble make_ensemble(const InitialDensity& initial, Eigen::Index n, std::uint64_t seed);

struct TrainingConfig {
    int inner_steps = 10;
    int batch_size = 400;  // 0 trains on the whole ensemble every inner step
    LossKind loss = LossKind::implicit;
    DivergenceMode divergence;
    double dsm_sigma = 0.1;
    AdamWOptions adamw;

    double pretrain_tolerance = 1e-3;
    int pretrain_max_steps = 5000;
    double pretrain_learning_rate = 1e-3;
    int pretrain_check_every = 50;

    bool operator==(const TrainingConfig&) const = default;
};

struct SbtmConfig {
    double dt = 0.01;
    double total_time = 1.0;
    TrainingConfig training;
    bool deterministic = true;
    std::uint64_t seed = 0;

    /// Number of forward-Euler steps covering [0, total_time].
    int step_count() const;
};

int step_count(double total_time, double dt);

struct PretrainReport {
    int steps = 0;
    double loss = 0.0;
    bool converged = false;
};

/// Fits s to grad log f_0 with the explicit MSE loss on `n` draws from f_0.
/// Stops once the loss on a fresh draw is <= tolerance or after `max_steps`.
PretrainReport pretrain(ScoreModel& model, const InitialDensity& initial, Eigen::Index n,
                        const TrainingConfig& training, Rng& rng);

struct StepReport {
    double training_loss = 0.0;  // mean over the inner steps (NaN when K = 0)
};

/// K inner optimizer steps on the current particles, then one transport step
/// X <- X + dt (grad log pi_{t+dt}(X) - s(X)).
StepReport sbtm_step(Ensemble& ensemble, ScoreModel& model, AdamWState& optimizer, const AnnealingSchedule& schedule,
                     const SbtmConfig& config);

/// Transport with a prescribed score field s(t, x) in place of the network.
void bypass_step(Ensemble& ensemble, const std::function<Matrix(double, const Matrix&)>& score_field,
                 const AnnealingSchedule& schedule, double dt);

/// Euler-Maruyama for dX = grad log pi_t dt + sqrt(2) dB.
void langevin_step(Ensemble& ensemble, const AnnealingSchedule& schedule, double dt);

struct BandwidthRule {
    std::optional<double> fixed;  // otherwise median^2 / log n
    double floor = 1e-8;
};

/// RBF-kernel SVGD bandwidth for the current ensemble.
double svgd_bandwidth(const Matrix& positions, const BandwidthRule& rule);

/// X_i <- X_i + dt (1/n) sum_j [k(X_j, X_i) grad log pi_t(X_j) + grad_{X_j} k(X_j, X_i)].
void svgd_step(Ensemble& ensemble, const AnnealingSchedule& schedule, double dt, const BandwidthRule& rule = {});

}  // namespace sbtm

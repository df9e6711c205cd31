#pragma once

#include <optional>
#include <string>

#include "sbtm/score_model.hpp"

namespace sbtm {

enum class LossKind { implicit, denoising, explicit_mse };

std::string to_string(LossKind kind);
LossKind loss_from_string(const std::string& name);

struct DivergenceMode {
    enum class Kind { exact, hutchinson } kind = Kind::exact;
    int probes = 1;

    static DivergenceMode exact() { return {}; }
    static DivergenceMode hutchinson(int m) { return {Kind::hutchinson, m}; }
    bool operator==(const DivergenceMode&) const = default;
};

/// Mini-batch of particle positions (d x n_b), with reference scores for the explicit loss.
struct LossBatch {
    Matrix points;
    std::optional<Matrix> reference_scores;
};

struct LossGradient {
    double value = 0.0;
    Vector gradient;
};

/// (1/n) sum |s(x_i) - ref_i|^2
double explicit_mse_loss(const ScoreModel& model, const LossBatch& batch);
LossGradient explicit_mse_gradient(const ScoreModel& model, const LossBatch& batch);

/// (1/n) sum (|s(x_i)|^2 + 2 div s(x_i)). Equals E|s - grad log f|^2 minus E|grad log f|^2.
/// `rng` is only drawn from in Hutchinson mode.
double implicit_loss(const ScoreModel& model, const LossBatch& batch, DivergenceMode mode, Rng& rng);
LossGradient implicit_gradient(const ScoreModel& model, const LossBatch& batch, DivergenceMode mode, Rng& rng);

/// (1/n) sum |s(x_i + sigma eps_i) + eps_i / sigma|^2 with eps_i ~ N(0, I).
double denoising_loss(const ScoreModel& model, const LossBatch& batch, double sigma, Rng& rng);
LossGradient denoising_gradient(const ScoreModel& model, const LossBatch& batch, double sigma, Rng& rng);

/// (1/n) sum |s_i - ref(x_i)|^2 for precomputed scores s_i at `points`.
double empirical_score_loss(const Matrix& scores, const Matrix& points, const ScoreFn& reference);
double empirical_score_loss(const ScoreModel& model, const Matrix& points, const ScoreFn& reference);

}  // namespace sbtm

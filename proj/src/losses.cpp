#include "sbtm/losses.hpp"

namespace sbtm {

namespace {

void require_nonempty(const LossBatch& batch, const char* who) {
    if (batch.points.cols() == 0) throw std::invalid_argument(std::string(who) + ": empty batch");
}

const Matrix& reference_of(const LossBatch& batch, const char* who) {
    if (!batch.reference_scores) throw std::invalid_argument(std::string(who) + ": reference scores required");
    if (batch.reference_scores->rows() != batch.points.rows() || batch.reference_scores->cols() != batch.points.cols())
        throw std::invalid_argument(std::string(who) + ": reference scores must match the batch shape");
    return *batch.reference_scores;
}

// Directions and the per-direction weights whose weighted contraction gives div s.
Matrix divergence_directions(int dim, Eigen::Index n, DivergenceMode mode, Rng& rng, double& weight) {
    if (mode.kind == DivergenceMode::Kind::exact) {
        weight = 1.0;
        return coordinate_directions(dim, n);
    }
    if (mode.probes < 1) throw std::invalid_argument("hutchinson divergence: probes must be >= 1");
    weight = 1.0 / mode.probes;
    return rademacher(dim, n * mode.probes, rng);
}

Matrix noise_for(const LossBatch& batch, double sigma, Rng& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("denoising loss: sigma must be positive");
    return standard_normal(batch.points.rows(), batch.points.cols(), rng);
}

}  // namespace

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::implicit: return "implicit";
        case LossKind::denoising: return "denoising";
        case LossKind::explicit_mse: return "explicit";
    }
    return "unknown";
}

LossKind loss_from_string(const std::string& name) {
    if (name == "implicit") return LossKind::implicit;
    if (name == "denoising") return LossKind::denoising;
    if (name == "explicit") return LossKind::explicit_mse;
    throw std::invalid_argument("unknown loss '" + name + "' (expected implicit, denoising or explicit)");
}

double explicit_mse_loss(const ScoreModel& model, const LossBatch& batch) {
    require_nonempty(batch, "explicit_mse_loss");
    const Matrix& ref = reference_of(batch, "explicit_mse_loss");
    return (model.forward(batch.points) - ref).squaredNorm() / static_cast<double>(batch.points.cols());
}

LossGradient explicit_mse_gradient(const ScoreModel& model, const LossBatch& batch) {
    require_nonempty(batch, "explicit_mse_gradient");
    const Matrix& ref = reference_of(batch, "explicit_mse_gradient");
    const double n = static_cast<double>(batch.points.cols());
    const auto tr = model.trace(batch.points, Matrix(model.dim(), 0));
    const Matrix residual = tr.output - ref;
    return {residual.squaredNorm() / n, model.backward(tr, (2.0 / n) * residual, Matrix())};
}

double implicit_loss(const ScoreModel& model, const LossBatch& batch, DivergenceMode mode, Rng& rng) {
    require_nonempty(batch, "implicit_loss");
    const Eigen::Index n = batch.points.cols();
    double weight = 1.0;
    const Matrix dirs = divergence_directions(model.dim(), n, mode, rng, weight);
    const auto tr = model.trace(batch.points, dirs);
    const double div_sum = weight * contract_directions(dirs, tr.output_tangent, n).sum();
    return (tr.output.squaredNorm() + 2.0 * div_sum) / static_cast<double>(n);
}

LossGradient implicit_gradient(const ScoreModel& model, const LossBatch& batch, DivergenceMode mode, Rng& rng) {
    require_nonempty(batch, "implicit_gradient");
    const Eigen::Index n = batch.points.cols();
    const double nd = static_cast<double>(n);
    double weight = 1.0;
    const Matrix dirs = divergence_directions(model.dim(), n, mode, rng, weight);
    const auto tr = model.trace(batch.points, dirs);
    const double div_sum = weight * contract_directions(dirs, tr.output_tangent, n).sum();
    const double value = (tr.output.squaredNorm() + 2.0 * div_sum) / nd;
    const Matrix value_adj = (2.0 / nd) * tr.output;
    const Matrix tangent_adj = (2.0 * weight / nd) * dirs;
    return {value, model.backward(tr, value_adj, tangent_adj)};
}

double denoising_loss(const ScoreModel& model, const LossBatch& batch, double sigma, Rng& rng) {
    require_nonempty(batch, "denoising_loss");
    const Matrix eps = noise_for(batch, sigma, rng);
    const Matrix residual = model.forward(Matrix(batch.points + sigma * eps)) + eps / sigma;
    return residual.squaredNorm() / static_cast<double>(batch.points.cols());
}

LossGradient denoising_gradient(const ScoreModel& model, const LossBatch& batch, double sigma, Rng& rng) {
    require_nonempty(batch, "denoising_gradient");
    const Matrix eps = noise_for(batch, sigma, rng);
    const double n = static_cast<double>(batch.points.cols());
    const auto tr = model.trace(batch.points + sigma * eps, Matrix(model.dim(), 0));
    const Matrix residual = tr.output + eps / sigma;
    return {residual.squaredNorm() / n, model.backward(tr, (2.0 / n) * residual, Matrix())};
}

double empirical_score_loss(const Matrix& scores, const Matrix& points, const ScoreFn& reference) {
    if (points.cols() == 0) throw std::invalid_argument("empirical_score_loss: empty ensemble");
    return (scores - apply_columns(reference, points)).squaredNorm() / static_cast<double>(points.cols());
}

double empirical_score_loss(const ScoreModel& model, const Matrix& points, const ScoreFn& reference) {
    return empirical_score_loss(model.forward(points), points, reference);
}

}  // namespace sbtm

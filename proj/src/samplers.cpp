#include "sbtm/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sbtm {

Ensemble make_ensemble(const InitialDensity& initial, Eigen::Index n, std::uint64_t seed) {
    Ensemble e;
    e.rng.seed(seed);
    e.positions = initial.sample(n, e.rng);
    e.time = 0.0;
    return e;
}

int step_count(double total_time, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (total_time <= 0.0) return 0;
    return static_cast<int>(std::llround(total_time / dt));
}

int SbtmConfig::step_count() const { return sbtm::step_count(total_time, dt); }

namespace {

Matrix gather(const Matrix& points, const std::vector<Eigen::Index>& idx, std::size_t begin, std::size_t count) {
    Matrix out(points.rows(), static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j) out.col(static_cast<Eigen::Index>(j)) = points.col(idx[begin + j]);
    return out;
}

// Minibatches drawn without replacement from a permutation reshuffled on exhaustion.
class BatchSampler {
public:
    BatchSampler(Eigen::Index n, int batch_size, Rng& rng)
        : order_(static_cast<std::size_t>(n)),
          batch_(batch_size <= 0 ? static_cast<std::size_t>(n)
                                 : std::min<std::size_t>(static_cast<std::size_t>(batch_size), static_cast<std::size_t>(n))),
          rng_(rng) {
        std::iota(order_.begin(), order_.end(), Eigen::Index{0});
        reshuffle();
    }

    Matrix next(const Matrix& points) {
        if (cursor_ + batch_ > order_.size()) reshuffle();
        Matrix out = gather(points, order_, cursor_, batch_);
        cursor_ += batch_;
        return out;
    }

private:
    void reshuffle() {
        std::shuffle(order_.begin(), order_.end(), rng_);
        cursor_ = 0;
    }

    std::vector<Eigen::Index> order_;
    std::size_t batch_;
    std::size_t cursor_ = 0;
    Rng& rng_;
};

LossGradient training_gradient(const ScoreModel& model, const Matrix& batch, const TrainingConfig& training, Rng& rng) {
    LossBatch lb{batch, std::nullopt};
    switch (training.loss) {
        case LossKind::implicit: return implicit_gradient(model, lb, training.divergence, rng);
        case LossKind::denoising: return denoising_gradient(model, lb, training.dsm_sigma, rng);
        case LossKind::explicit_mse: break;
    }
    throw std::invalid_argument("sbtm_step: the explicit loss needs grad log f_t and cannot drive training");
}

}  // namespace

PretrainReport pretrain(ScoreModel& model, const InitialDensity& initial, Eigen::Index n,
                        const TrainingConfig& training, Rng& rng) {
    PretrainReport report;
    if (n < 1) throw std::invalid_argument("pretrain: n must be >= 1");
    auto fresh_loss = [&] {
        const Matrix probe = initial.sample(n, rng);
        return explicit_mse_loss(model, {probe, apply_columns(initial.score, probe)});
    };
    if (std::isinf(training.pretrain_tolerance)) {
        report.converged = true;
        report.loss = std::numeric_limits<double>::quiet_NaN();
        return report;
    }

    const Matrix train = initial.sample(n, rng);
    const Matrix train_scores = apply_columns(initial.score, train);
    AdamWOptions opts = training.adamw;
    opts.learning_rate = training.pretrain_learning_rate;
    AdamWState state(model.parameter_count(), opts);
    BatchSampler sampler(n, training.batch_size, rng);
    // Reuse the sampler's permutation for points and their reference scores.
    Matrix stacked(train.rows() * 2, train.cols());
    stacked << train, train_scores;

    const int check_every = std::max(1, training.pretrain_check_every);
    report.loss = fresh_loss();
    while (true) {
        if (report.loss <= training.pretrain_tolerance) {
            report.converged = true;
            break;
        }
        if (report.steps >= training.pretrain_max_steps) break;
        for (int i = 0; i < check_every && report.steps < training.pretrain_max_steps; ++i) {
            const Matrix batch = sampler.next(stacked);
            const auto lg = explicit_mse_gradient(model, {batch.topRows(train.rows()), batch.bottomRows(train.rows())});
            adamw_step(model.params(), state, lg.gradient);
            ++report.steps;
        }
        report.loss = fresh_loss();
    }
    return report;
}

StepReport sbtm_step(Ensemble& ensemble, ScoreModel& model, AdamWState& optimizer, const AnnealingSchedule& schedule,
                     const SbtmConfig& config) {
    const double t_next = ensemble.time + config.dt;
    StepReport report;
    const int inner = config.training.inner_steps;
    if (inner > 0) {
        BatchSampler sampler(ensemble.size(), config.training.batch_size, ensemble.rng);
        double total = 0.0;
        for (int k = 0; k < inner; ++k) {
            const Matrix batch = sampler.next(ensemble.positions);
            const auto lg = training_gradient(model, batch, config.training, ensemble.rng);
            adamw_step(model.params(), optimizer, lg.gradient);
            total += lg.value;
        }
        report.training_loss = total / inner;
    } else {
        report.training_loss = std::numeric_limits<double>::quiet_NaN();
    }

    const Matrix learned = model.forward(ensemble.positions);
    ensemble.positions += config.dt * (schedule.score_batch(t_next, ensemble.positions) - learned);
    ensemble.time = t_next;
    check_finite(ensemble.positions, ensemble.time, "sbtm_step");
    return report;
}

void bypass_step(Ensemble& ensemble, const std::function<Matrix(double, const Matrix&)>& score_field,
                 const AnnealingSchedule& schedule, double dt) {
    const double t_next = ensemble.time + dt;
    const Matrix s = score_field(t_next, ensemble.positions);
    ensemble.positions += dt * (schedule.score_batch(t_next, ensemble.positions) - s);
    ensemble.time = t_next;
    check_finite(ensemble.positions, ensemble.time, "bypass_step");
}

void langevin_step(Ensemble& ensemble, const AnnealingSchedule& schedule, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("langevin_step: dt must be positive");
    const double t_next = ensemble.time + dt;
    const Matrix drift = schedule.score_batch(t_next, ensemble.positions);
    const Matrix noise = standard_normal(ensemble.positions.rows(), ensemble.positions.cols(), ensemble.rng);
    ensemble.positions += dt * drift + std::sqrt(2.0 * dt) * noise;
    ensemble.time = t_next;
    check_finite(ensemble.positions, ensemble.time, "langevin_step");
}

double svgd_bandwidth(const Matrix& positions, const BandwidthRule& rule) {
    if (rule.fixed) return std::max(*rule.fixed, rule.floor);
    const Eigen::Index n = positions.cols();
    if (n < 2) throw std::invalid_argument("svgd_bandwidth: need at least two particles");
    // Pairwise distances over at most 4096 particles; beyond that a strided subset stands in.
    const Eigen::Index cap = 4096;
    const Eigen::Index stride = n > cap ? (n + cap - 1) / cap : 1;
    std::vector<double> sq;
    for (Eigen::Index i = 0; i < n; i += stride)
        for (Eigen::Index j = i + stride; j < n; j += stride) sq.push_back((positions.col(i) - positions.col(j)).squaredNorm());
    auto mid = sq.begin() + static_cast<std::ptrdiff_t>(sq.size() / 2);
    std::nth_element(sq.begin(), mid, sq.end());
    double median_sq = *mid;
    if (sq.size() % 2 == 0) {
        const double lower = *std::max_element(sq.begin(), mid);
        median_sq = 0.5 * (median_sq + lower);
    }
    return std::max(median_sq / std::log(static_cast<double>(n)), rule.floor);
}

void svgd_step(Ensemble& ensemble, const AnnealingSchedule& schedule, double dt, const BandwidthRule& rule) {
    const Eigen::Index n = ensemble.size();
    if (n < 2) throw std::invalid_argument("svgd_step: need at least two particles");
    const double t_next = ensemble.time + dt;
    const double h = svgd_bandwidth(ensemble.positions, rule);
    const Matrix& x = ensemble.positions;
    const Matrix scores = schedule.score_batch(t_next, x);
    const int d = ensemble.dim();
    Matrix phi = Matrix::Zero(d, n);
    const double* xs = x.data();
    const double* ss = scores.data();
    std::vector<double> diff(d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* xi = xs + i * d;
        double* out = phi.data() + i * d;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double* xj = xs + j * d;
            const double* sj = ss + j * d;
            double r2 = 0.0;
            for (int a = 0; a < d; ++a) {
                diff[a] = xi[a] - xj[a];
                r2 += diff[a] * diff[a];
            }
            const double k = std::exp(-r2 / h);
            // grad_{x_j} k(x_j, x_i) = 2 (x_i - x_j) k / h
            for (int a = 0; a < d; ++a) out[a] += k * (sj[a] + (2.0 / h) * diff[a]);
        }
    }
    ensemble.positions += (dt / static_cast<double>(n)) * phi;
    ensemble.time = t_next;
    check_finite(ensemble.positions, ensemble.time, "svgd_step");
}

}  // namespace sbtm

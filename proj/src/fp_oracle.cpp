#include "sbtm/fp_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace sbtm {

namespace {

// B(z) = z / (e^z - 1)
double bernoulli(double z) {
    if (std::abs(z) < 1e-6) return 1.0 - 0.5 * z + z * z / 12.0;
    return z / std::expm1(z);
}

Vector drift_on(const AnnealingSchedule& schedule, double t, const Vector& faces) {
    Vector a(faces.size());
    for (Eigen::Index k = 0; k < faces.size(); ++k) a[k] = schedule.score(t, Vector::Constant(1, faces[k]))[0];
    return a;
}

}  // namespace

double FokkerPlanck1D::stable_dt(double spacing, double drift_bound) {
    return spacing * spacing / (2.0 + spacing * drift_bound);
}

FokkerPlanck1D::FokkerPlanck1D(const AnnealingSchedule& schedule, const Options& options) : schedule_(schedule) {
    if (!(options.spacing > 0.0) || !(options.hi > options.lo))
        throw std::invalid_argument("FokkerPlanck1D: invalid domain");
    const int points = static_cast<int>(std::lround((options.hi - options.lo) / options.spacing)) + 1;
    grid_ = GridSpec{1, options.lo, options.hi, points};
    faces_.resize(points - 1);
    for (int k = 0; k + 1 < points; ++k) faces_[k] = grid_.node(k) + 0.5 * grid_.spacing();

    if (schedule.kind != AnnealingSchedule::Kind::dilation) {
        target_drift_ = Vector(faces_.size());
        for (Eigen::Index k = 0; k < faces_.size(); ++k) target_drift_[k] = schedule.target_score(Vector::Constant(1, faces_[k]))[0];
    }
    if (schedule.kind == AnnealingSchedule::Kind::geometric) {
        initial_drift_ = Vector(faces_.size());
        for (Eigen::Index k = 0; k < faces_.size(); ++k) initial_drift_[k] = schedule.initial_score(Vector::Constant(1, faces_[k]))[0];
    }

    drift_bound_ = options.drift_bound;
    if (drift_bound_ <= 0.0) {
        std::vector<double> probe_times = {0.0};
        if (schedule.kind != AnnealingSchedule::Kind::none) {
            probe_times.push_back(schedule.duration);
            probe_times.push_back(std::max(schedule.t_min, 1e-12));
        }
        for (double t : probe_times) drift_bound_ = std::max(drift_bound_, drift_on(schedule_, t, faces_).cwiseAbs().maxCoeff());
    }
    const double limit = stable_dt(grid_.spacing(), drift_bound_);
    dt_ = options.dt > 0.0 ? options.dt : 0.9 * limit;
    if (dt_ > limit)
        throw std::invalid_argument("FokkerPlanck1D: dt " + std::to_string(dt_) + " exceeds the stability bound " +
                                    std::to_string(limit));
    values_ = Vector::Zero(points);
}

void FokkerPlanck1D::set_density(const LogDensityFn& log_density) {
    values_ = grid_density_from(grid_, log_density).values;
}

void FokkerPlanck1D::set_values(const Vector& values) {
    if (values.size() != values_.size()) throw std::invalid_argument("FokkerPlanck1D::set_values: size mismatch");
    values_ = values;
}

void FokkerPlanck1D::step() {
    const double h = grid_.spacing();
    const Eigen::Index m = values_.size();

    Vector a;
    switch (schedule_.kind) {
        case AnnealingSchedule::Kind::none: a = target_drift_; break;
        case AnnealingSchedule::Kind::geometric: {
            const double tau = schedule_.geometric_weight(time_);
            a = (1.0 - tau) * initial_drift_ + tau * target_drift_;
            break;
        }
        case AnnealingSchedule::Kind::dilation: a = drift_on(schedule_, time_, faces_); break;
    }

    Vector flux(m + 1);
    flux[0] = 0.0;
    flux[m] = 0.0;
    for (Eigen::Index k = 0; k + 1 < m; ++k) {
        const double z = a[k] * h;
        flux[k + 1] = (bernoulli(-z) * values_[k] - bernoulli(z) * values_[k + 1]) / h;
    }
    for (Eigen::Index k = 0; k < m; ++k) values_[k] -= dt_ / h * (flux[k + 1] - flux[k]);
    time_ += dt_;
}

void FokkerPlanck1D::advance_to(double t) {
    const double full = dt_;
    while (time_ < t - 1e-12) {
        dt_ = std::min(full, t - time_);
        step();
    }
    dt_ = full;
}

double FokkerPlanck1D::mass() const { return values_.sum() * grid_.spacing(); }

double FokkerPlanck1D::mean() const {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < values_.size(); ++k) acc += grid_.node(static_cast<int>(k)) * values_[k];
    return acc * grid_.spacing() / mass();
}

double FokkerPlanck1D::variance() const {
    const double mu = mean();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
        const double dx = grid_.node(static_cast<int>(k)) - mu;
        acc += dx * dx * values_[k];
    }
    return acc * grid_.spacing() / mass();
}

std::vector<double> fp_kl_trajectory(const LogDensityFn& initial_log_density, const TargetDensity& target,
                                     const AnnealingSchedule& schedule, const std::vector<double>& record_times,
                                     const FokkerPlanck1D::Options& options) {
    if (target.dim != 1) throw std::invalid_argument("fp_kl_trajectory: 1D targets only");
    FokkerPlanck1D solver(schedule, options);
    solver.set_density(initial_log_density);
    const GridDensity pi = grid_density_from(solver.grid(), target.log_density);
    std::vector<double> out;
    for (double t : record_times) {
        if (t < solver.time() - 1e-12) throw std::invalid_argument("fp_kl_trajectory: record times must be increasing");
        solver.advance_to(t);
        out.push_back(kl_on_grid(solver.density(), pi));
    }
    return out;
}

GridScore fp_score(const GridDensity& density, double floor) {
    if (density.grid.dim != 1) throw std::invalid_argument("fp_score: 1D grids only");
    const Eigen::Index m = density.values.size();
    const double h = density.grid.spacing();
    GridScore s;
    s.x.resize(m);
    s.score = Vector::Zero(m);
    s.valid.assign(static_cast<std::size_t>(m), false);
    for (Eigen::Index k = 0; k < m; ++k) s.x[k] = density.grid.node(static_cast<int>(k));
    for (Eigen::Index k = 1; k + 1 < m; ++k) {
        const double lo = density.values[k - 1];
        const double hi = density.values[k + 1];
        if (lo < floor || hi < floor || density.values[k] < floor) continue;
        s.score[k] = (std::log(hi) - std::log(lo)) / (2.0 * h);
        s.valid[static_cast<std::size_t>(k)] = true;
    }
    return s;
}

}  // namespace sbtm

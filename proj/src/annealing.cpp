#include "sbtm/annealing.hpp"

#include <algorithm>

namespace sbtm {

double AnnealingSchedule::geometric_weight(double t) const {
    if (!(duration > 0.0)) return 1.0;
    return std::clamp(t / duration, 0.0, 1.0);
}

Vector AnnealingSchedule::score(double t, const Eigen::Ref<const Vector>& x) const {
    switch (kind) {
        case Kind::none:
            return target_score(x);
        case Kind::geometric: {
            const double tau = geometric_weight(t);
            if (tau >= 1.0) return target_score(x);
            if (tau <= 0.0) return initial_score(x);
            return (1.0 - tau) * initial_score(x) + tau * target_score(x);
        }
        case Kind::dilation: {
            const double scale = duration / std::max(t, t_min);
            const Vector y = scale * x;
            return scale * target_score(y);
        }
    }
    return target_score(x);
}

Matrix AnnealingSchedule::score_batch(double t, const Matrix& points) const {
    Matrix out(points.rows(), points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) out.col(i) = score(t, points.col(i));
    return out;
}

std::string to_string(AnnealingSchedule::Kind kind) {
    switch (kind) {
        case AnnealingSchedule::Kind::none: return "none";
        case AnnealingSchedule::Kind::geometric: return "geometric";
        case AnnealingSchedule::Kind::dilation: return "dilation";
    }
    return "unknown";
}

AnnealingSchedule::Kind schedule_from_string(const std::string& name) {
    if (name == "none") return AnnealingSchedule::Kind::none;
    if (name == "geometric") return AnnealingSchedule::Kind::geometric;
    if (name == "dilation") return AnnealingSchedule::Kind::dilation;
    throw std::invalid_argument("unknown schedule '" + name + "' (expected none, geometric or dilation)");
}

AnnealingSchedule make_schedule(AnnealingSchedule::Kind kind, double duration, double t_min,
                                const InitialDensity& initial, const TargetDensity& target) {
    if (kind != AnnealingSchedule::Kind::none && !(duration > 0.0))
        throw std::invalid_argument("make_schedule: duration must be positive");
    if (kind == AnnealingSchedule::Kind::dilation && !(t_min > 0.0))
        throw std::invalid_argument("make_schedule: dilation requires t_min > 0");
    AnnealingSchedule s;
    s.kind = kind;
    s.duration = duration;
    s.t_min = t_min;
    s.initial_score = initial.score;
    s.target_score = target.score;
    return s;
}

}  // namespace sbtm

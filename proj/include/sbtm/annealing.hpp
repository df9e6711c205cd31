#pragma once

#include <string>

#include "sbtm/densities.hpp"

namespace sbtm {

/// Time-dependent intermediate target pi_t between f_0 and pi, exposed through its score.
///   none:      grad log pi
///   geometric: (1 - tau) grad log f_0 + tau grad log pi, tau = min(t / duration, 1)
///   dilation:  (T / t') grad log pi((T / t') x), t' = max(t, t_min), T = duration
struct AnnealingSchedule {
    enum class Kind { none, geometric, dilation };

    Kind kind = Kind::none;
    double duration = 1.0;
    double t_min = 0.0;
    ScoreFn initial_score;
    ScoreFn target_score;

    double geometric_weight(double t) const;
    Vector score(double t, const Eigen::Ref<const Vector>& x) const;
    Matrix score_batch(double t, const Matrix& points) const;
};

std::string to_string(AnnealingSchedule::Kind kind);
AnnealingSchedule::Kind schedule_from_string(const std::string& name);

AnnealingSchedule make_schedule(AnnealingSchedule::Kind kind, double duration, double t_min,
                                const InitialDensity& initial, const TargetDensity& target);

inline Vector annealed_score(const AnnealingSchedule& schedule, double t, const Eigen::Ref<const Vector>& x) {
    return schedule.score(t, x);
}

}  // namespace sbtm

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbtm/common.hpp"

namespace sbtm {

/// Unnormalized target density pi, accessed through its score.
struct TargetDensity {
    std::string name;
    int dim = 1;
    LogDensityFn log_density;  // unnormalized
    ScoreFn score;             // gradient of log_density
    GridSpec grid;             // quadrature grid for normalizer, KDE and KL (dim <= 2)
    std::optional<double> log_normalizer;

    Matrix score_batch(const Matrix& points) const { return apply_columns(score, points); }
};

struct InitialDensity {
    std::string name;
    int dim = 1;
    ScoreFn score;
    std::function<Vector(Rng&)> sampler;
    LogDensityFn log_density;  // normalized

    Matrix sample(Eigen::Index n, Rng& rng) const;
};

/// Closed-form gradient flow of KL(.|N(0, I)) started from N(0, (1 - e^{-2 t0}) I):
/// f_t = N(0, (1 - e^{-2(t + t0)}) I).
struct AnalyticSolution {
    int dim = 1;
    double time_offset = 0.1;

    double variance_at(double t) const;
    double density_at(double t, const Eigen::Ref<const Vector>& x) const;
    double log_density_at(double t, const Eigen::Ref<const Vector>& x) const;
    Vector score_at(double t, const Eigen::Ref<const Vector>& x) const;
    double kl_to_target_at(double t) const;
    double fisher_at(double t) const;
};

/// log of the integral of exp(log_density) on the grid (Riemann sum).
double quadrature_log_normalizer(const LogDensityFn& log_density, const GridSpec& grid);

/// Fills `log_normalizer` by quadrature when dim <= 2.
void attach_log_normalizer(TargetDensity& target);

TargetDensity make_standard_gaussian(int dim);
InitialDensity make_gaussian_initial(int dim, double variance = 1.0);

/// Isotropic Gaussian mixture; component k is N(means[k], variances[k] I).
TargetDensity make_gaussian_mixture(std::vector<double> weights, std::vector<Vector> means,
                                    std::vector<double> variances);
TargetDensity make_gaussian_mixture_1d(const std::vector<double>& weights,
                                       const std::vector<double>& means,
                                       const std::vector<double>& variances);

/// pi(x) ~ exp(-(|x - c| - r)^2 / temperature) in 2D. The score is 0 at x = c.
TargetDensity make_noisy_circle(const Eigen::Vector2d& center, double radius, double temperature);

/// Equal-weight mixture on a modes_per_side x modes_per_side grid centred at the origin.
TargetDensity make_grid_mixture(int modes_per_side, double spacing, double variance);

}  // namespace sbtm

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbtm/annealing.hpp"
#include "sbtm/densities.hpp"
#include "sbtm/score_model.hpp"

namespace sbtm {

/// One row of the diagnostics time series. Unavailable quantities are NaN.
struct DiagnosticsRecord {
    double t = 0.0;
    double loss = 0.0;
    double kl = 0.0;
    double fisher = 0.0;
    double dissipation = 0.0;  // dKL/dt, filled after the run
    double identity_lhs = 0.0; // -dKL/dt
    double identity_rhs = 0.0;
    double l2_error = 0.0;
    double cosine_sim = 0.0;
};

/// Nonnegative values on a GridSpec, normalized so that sum * cell_volume == 1.
struct GridDensity {
    GridSpec grid;
    Vector values;

    double mass() const { return values.sum() * grid.cell_volume(); }
};

/// Samples `fn` at every grid node and normalizes.
GridDensity grid_density_from(const GridSpec& grid, const LogDensityFn& log_density);

struct KdeOptions {
    std::optional<Vector> bandwidth;  // per-dimension standard deviations; Silverman otherwise
};

/// Per-dimension Silverman bandwidth sigma_a (4 / ((d + 2) n))^{1 / (d + 4)}.
Vector silverman_bandwidth(const Matrix& points);

/// Gaussian product-kernel density estimate on `grid` (dim <= 2).
GridDensity kde(const Matrix& points, const GridSpec& grid, const KdeOptions& options = {});

/// Grid convolution of a density with the same product Gaussian kernel a KDE would use.
GridDensity smooth(const GridDensity& density, const Vector& bandwidth);

/// Quadrature of f log(f / p); cells with f < 1e-12 contribute 0.
double kl_on_grid(const GridDensity& f, const GridDensity& p);

enum class KlEstimator { plain, smoothed };

std::string to_string(KlEstimator e);
KlEstimator kl_estimator_from_string(const std::string& name);

struct KlOptions {
    KlEstimator estimator = KlEstimator::plain;
    KdeOptions kde;
};

/// KL(kde(points) | pi) by grid quadrature. With the smoothed estimator, pi is convolved with
/// the KDE kernel first so both sides carry the same smoothing bias.
double estimate_kl(const Matrix& points, const TargetDensity& target, const KlOptions& options = {});

/// F^n = (1/n) sum |s_i - grad log pi(x_i)|^2 for precomputed learned scores s_i.
double fisher_estimate(const Matrix& learned_scores, const Matrix& points, const TargetDensity& target);
double fisher_estimate(const ScoreModel& model, const Matrix& points, const TargetDensity& target);

/// Centered differences of kl over t (one-sided second order at the ends). Returns dKL/dt.
std::vector<double> dissipation_rate(const std::vector<double>& t, const std::vector<double>& kl);

/// (1/n) sum <s_i - grad log pi_t(x_i), s_i - grad log pi(x_i)>.
double annealed_identity_rhs(const Matrix& learned_scores, const Matrix& points, const AnnealingSchedule& schedule,
                             const TargetDensity& target, double t);

struct IdentityPair {
    double lhs;
    double rhs;
};

/// Pairs the rhs at time t with lhs = -dissipation (post-hoc dKL/dt at the same record).
IdentityPair annealed_identity(const ScoreModel& model, const Matrix& points, const AnnealingSchedule& schedule,
                               const TargetDensity& target, double t, double dissipation);

/// Grid L2 norm of kde(points) - f_t.
double l2_error(const Matrix& points, const AnalyticSolution& solution, double t, const GridSpec& grid);
double l2_distance(const GridDensity& a, const GridDensity& b);
double l1_distance(const GridDensity& a, const GridDensity& b);

/// Mean cosine between learned and target scores, skipping near-zero vectors.
double cosine_similarity(const Matrix& learned_scores, const Matrix& points, const TargetDensity& target);
double cosine_similarity(const ScoreModel& model, const TargetDensity& target, const Matrix& points);

/// Per-point parameter Jacobian rows: row (i d + a) is grad_theta s^a(x_i).
Matrix parameter_jacobian(const ScoreModel& model, const Matrix& points);

/// H_{(i,a),(j,b)} = sum_k d_k s^a(x_i) d_k s^b(x_j). Requires n d <= 512.
Matrix ntk_matrix(const ScoreModel& model, const Matrix& points);

/// Smallest eigenvalue of a symmetric matrix; rejects asymmetry above 1e-9 (relative to max |H|).
double ntk_min_eigenvalue(const Matrix& h);

/// Fills dissipation and identity_lhs from the kl column.
void finalize_records(std::vector<DiagnosticsRecord>& records);

}  // namespace sbtm

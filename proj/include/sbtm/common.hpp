#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sbtm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Point sets are stored column-wise: a d x n matrix holds n points in R^d.
using ScoreFn = std::function<Vector(const Eigen::Ref<const Vector>&)>;
using LogDensityFn = std::function<double(const Eigen::Ref<const Vector>&)>;

/// Evaluates a vector field at every column of `points`.
Matrix apply_columns(const ScoreFn& field, const Matrix& points);

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Entries +1/-1 with equal probability.
Matrix rademacher(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Uniform tensor grid on [lo, hi]^dim with `points` nodes per axis (dim <= 2).
struct GridSpec {
    int dim = 1;
    double lo = -10.0;
    double hi = 10.0;
    int points = 2001;

    double spacing() const { return (hi - lo) / (points - 1); }
    double cell_volume() const;
    std::size_t size() const;
    double node(int i) const { return lo + i * spacing(); }
    /// Coordinates of the flat index `k`; axis 0 varies fastest.
    Vector coords(std::size_t k) const;

    bool operator==(const GridSpec&) const = default;
};

GridSpec default_grid(int dim);

/// Raised when a particle coordinate becomes NaN or infinite.
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& what, double time, Eigen::Index particle)
        : std::runtime_error(what), time_(time), particle_(particle) {}
    double time() const { return time_; }
    Eigen::Index particle() const { return particle_; }

private:
    double time_;
    Eigen::Index particle_;
};

/// Throws NonFiniteError naming the first offending particle.
void check_finite(const Matrix& points, double time, const char* context);

}  // namespace sbtm

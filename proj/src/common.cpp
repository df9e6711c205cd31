#include "sbtm/common.hpp"

#include <cmath>
#include <sstream>

namespace sbtm {

Matrix apply_columns(const ScoreFn& field, const Matrix& points) {
    Matrix out(points.rows(), points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        out.col(i) = field(points.col(i));
    }
    return out;
}

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
    return out;
}

Matrix rademacher(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    Matrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = coin(rng) ? 1.0 : -1.0;
    return out;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t GridSpec::size() const {
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(points);
    return total;
}

Vector GridSpec::coords(std::size_t k) const {
    Vector x(dim);
    for (int a = 0; a < dim; ++a) {
        x[a] = node(static_cast<int>(k % points));
        k /= points;
    }
    return x;
}

GridSpec default_grid(int dim) {
    if (dim == 1) return {1, -10.0, 10.0, 2001};
    return {dim, -10.0, 10.0, 401};
}

void check_finite(const Matrix& points, double time, const char* context) {
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        if (!points.col(i).allFinite()) {
            std::ostringstream msg;
            msg << context << ": non-finite coordinate in particle " << i << " at t=" << time
                << " (" << points.col(i).transpose() << ")";
            throw NonFiniteError(msg.str(), time, i);
        }
    }
}

}  // namespace sbtm

#pragma once

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "sbtm/score_model.hpp"

namespace sbtm::testing {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

/// Central differences of a scalar function.
template <class F>
Vector fd_gradient(F&& f, const Vector& x, double h = 1e-5) {
    Vector g(x.size());
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        Vector xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        g[a] = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
}

/// Glorot init, then every parameter (output layer included) jittered so nothing is trivially zero.
inline ScoreModel random_model(const Architecture& arch, std::uint64_t seed, double jitter = 0.3) {
    Rng rng(seed);
    ScoreModel m = ScoreModel::glorot(arch, rng);
    m.params() += jitter * standard_normal(static_cast<Eigen::Index>(m.parameter_count()), 1, rng).col(0);
    return m;
}

inline Architecture small_arch(int d, int width = 6, int layers = 2) {
    Architecture a;
    a.input_dim = d;
    a.width = width;
    a.hidden_layers = layers;
    return a;
}

/// Single affine map x -> W x + b.
inline ScoreModel linear_model(const Matrix& w, const Vector& b) {
    Architecture a;
    a.input_dim = static_cast<int>(w.rows());
    a.hidden_layers = 0;
    ScoreModel m(a);
    m.weight(0) = w;
    m.bias(0) = b;
    return m;
}

}  // namespace sbtm::testing

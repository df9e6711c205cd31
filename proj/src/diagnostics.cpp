#include "sbtm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sbtm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kKernelReach = 8.0;  // kernel truncated at this many bandwidths

void require_low_dim(int dim, const char* who) {
    if (dim < 1 || dim > 2) throw std::invalid_argument(std::string(who) + ": grid estimators support dim 1 or 2");
}

void normalize(GridDensity& g) {
    const double m = g.mass();
    if (m > 0.0) g.values /= m;
}

// Gaussian kernel weights phi_h(node_k - x) for nodes within reach of x.
struct KernelWindow {
    int first = 0;
    std::vector<double> weights;
};

KernelWindow kernel_window(const GridSpec& grid, double x, double h) {
    KernelWindow w;
    const double step = grid.spacing();
    // clamp in floating point first: a diverged ensemble can have enormous x or h
    const double last = grid.points - 1;
    const int lo = static_cast<int>(std::clamp(std::floor((x - kKernelReach * h - grid.lo) / step), 0.0, last + 1));
    const int hi = static_cast<int>(std::clamp(std::ceil((x + kKernelReach * h - grid.lo) / step), -1.0, last));
    w.first = lo;
    if (hi < lo) return w;
    const double coef = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h);
    w.weights.resize(static_cast<std::size_t>(hi - lo + 1));
    for (int k = lo; k <= hi; ++k) {
        const double u = (grid.node(k) - x) / h;
        w.weights[static_cast<std::size_t>(k - lo)] = coef * std::exp(-0.5 * u * u);
    }
    return w;
}

// 1D Gaussian convolution along `axis` of a field stored with axis 0 fastest.
Vector convolve_axis(const Vector& values, const GridSpec& grid, int axis, double h) {
    const int m = grid.points;
    const double step = grid.spacing();
    const int reach = static_cast<int>(std::min(std::ceil(kKernelReach * h / step), double(m)));
    std::vector<double> taps(static_cast<std::size_t>(2 * reach + 1));
    for (int k = -reach; k <= reach; ++k) {
        const double u = k * step / h;
        taps[static_cast<std::size_t>(k + reach)] = step * std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * h);
    }
    Vector out = Vector::Zero(values.size());
    const std::size_t lines = grid.size() / static_cast<std::size_t>(m);
    const std::size_t stride = axis == 0 ? 1 : static_cast<std::size_t>(m);
    for (std::size_t line = 0; line < lines; ++line) {
        const std::size_t base = axis == 0 ? line * m : line;
        for (int i = 0; i < m; ++i) {
            double acc = 0.0;
            const int jlo = std::max(0, i - reach);
            const int jhi = std::min(m - 1, i + reach);
            for (int j = jlo; j <= jhi; ++j) acc += taps[static_cast<std::size_t>(j - i + reach)] * values[base + j * stride];
            out[base + i * stride] = acc;
        }
    }
    return out;
}

}  // namespace

GridDensity grid_density_from(const GridSpec& grid, const LogDensityFn& log_density) {
    require_low_dim(grid.dim, "grid_density_from");
    GridDensity g{grid, Vector(static_cast<Eigen::Index>(grid.size()))};
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        g.values[k] = log_density(grid.coords(k));
        peak = std::max(peak, g.values[k]);
    }
    g.values = (g.values.array() - peak).exp();
    normalize(g);
    return g;
}

Vector silverman_bandwidth(const Matrix& points) {
    const double n = static_cast<double>(points.cols());
    const int d = static_cast<int>(points.rows());
    const double factor = std::pow(4.0 / ((d + 2) * n), 1.0 / (d + 4));
    Vector h(d);
    for (int a = 0; a < d; ++a) {
        const auto row = points.row(a).array();
        const double mean = row.mean();
        const double var = n > 1 ? (row - mean).square().sum() / (n - 1) : 0.0;
        h[a] = std::sqrt(var) * factor;
    }
    return h;
}

GridDensity kde(const Matrix& points, const GridSpec& grid, const KdeOptions& options) {
    require_low_dim(grid.dim, "kde");
    if (points.cols() == 0) throw std::invalid_argument("kde: empty ensemble");
    if (points.rows() != grid.dim) throw std::invalid_argument("kde: point dimension does not match grid");
    Vector h = options.bandwidth ? *options.bandwidth : silverman_bandwidth(points);
    if (h.size() != grid.dim) throw std::invalid_argument("kde: bandwidth length does not match dimension");
    // A degenerate sample (zero spread) falls back to one grid cell.
    for (Eigen::Index a = 0; a < h.size(); ++a)
        if (!(h[a] > 0.0)) h[a] = grid.spacing();

    GridDensity g{grid, Vector::Zero(static_cast<Eigen::Index>(grid.size()))};
    const int m = grid.points;
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const auto wx = kernel_window(grid, points(0, i), h[0]);
        if (grid.dim == 1) {
            for (std::size_t k = 0; k < wx.weights.size(); ++k) g.values[wx.first + static_cast<int>(k)] += wx.weights[k];
            continue;
        }
        const auto wy = kernel_window(grid, points(1, i), h[1]);
        for (std::size_t ky = 0; ky < wy.weights.size(); ++ky) {
            double* row = g.values.data() + static_cast<std::size_t>(wy.first + static_cast<int>(ky)) * m + wx.first;
            const double wyk = wy.weights[ky];
            for (std::size_t kx = 0; kx < wx.weights.size(); ++kx) row[kx] += wyk * wx.weights[kx];
        }
    }
    normalize(g);
    return g;
}

GridDensity smooth(const GridDensity& density, const Vector& bandwidth) {
    require_low_dim(density.grid.dim, "smooth");
    GridDensity out = density;
    for (int a = 0; a < density.grid.dim; ++a) {
        if (bandwidth[a] > 0.0) out.values = convolve_axis(out.values, density.grid, a, bandwidth[a]);
    }
    normalize(out);
    return out;
}

double kl_on_grid(const GridDensity& f, const GridDensity& p) {
    if (f.values.size() != p.values.size()) throw std::invalid_argument("kl_on_grid: grids differ");
    double acc = 0.0;
    for (Eigen::Index k = 0; k < f.values.size(); ++k) {
        const double fk = f.values[k];
        if (fk < 1e-12) continue;
        acc += fk * (std::log(fk) - std::log(std::max(p.values[k], std::numeric_limits<double>::min())));
    }
    return acc * f.grid.cell_volume();
}

std::string to_string(KlEstimator e) { return e == KlEstimator::plain ? "plain" : "smoothed"; }

KlEstimator kl_estimator_from_string(const std::string& name) {
    if (name == "plain") return KlEstimator::plain;
    if (name == "smoothed") return KlEstimator::smoothed;
    throw std::invalid_argument("unknown kl estimator '" + name + "' (expected plain or smoothed)");
}

double estimate_kl(const Matrix& points, const TargetDensity& target, const KlOptions& options) {
    if (!target.log_normalizer) throw std::invalid_argument("estimate_kl: target has no quadrature normalizer");
    const GridSpec& grid = target.grid;
    const Vector h = options.kde.bandwidth ? *options.kde.bandwidth : silverman_bandwidth(points);
    KdeOptions kopts;
    kopts.bandwidth = h;
    const GridDensity f = kde(points, grid, kopts);

    if (options.estimator == KlEstimator::smoothed) {
        const GridDensity p = smooth(grid_density_from(grid, target.log_density), h);
        return kl_on_grid(f, p);
    }
    const double log_z = *target.log_normalizer;
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double fk = f.values[static_cast<Eigen::Index>(k)];
        if (fk < 1e-12) continue;
        acc += fk * (std::log(fk) - (target.log_density(grid.coords(k)) - log_z));
    }
    return acc * grid.cell_volume();
}

double fisher_estimate(const Matrix& learned_scores, const Matrix& points, const TargetDensity& target) {
    if (points.cols() == 0) return kNaN;
    return (learned_scores - target.score_batch(points)).squaredNorm() / static_cast<double>(points.cols());
}

double fisher_estimate(const ScoreModel& model, const Matrix& points, const TargetDensity& target) {
    return fisher_estimate(model.forward(points), points, target);
}

std::vector<double> dissipation_rate(const std::vector<double>& t, const std::vector<double>& kl) {
    const std::size_t n = t.size();
    if (n != kl.size()) throw std::invalid_argument("dissipation_rate: t and kl differ in length");
    if (n < 3) throw std::invalid_argument("dissipation_rate: need at least 3 samples");
    std::vector<double> out(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = t[i] - t[i - 1];
        const double h2 = t[i + 1] - t[i];
        out[i] = -h2 / (h1 * (h1 + h2)) * kl[i - 1] + (h2 - h1) / (h1 * h2) * kl[i] + h1 / (h2 * (h1 + h2)) * kl[i + 1];
    }
    {
        const double h1 = t[1] - t[0];
        const double h2 = t[2] - t[1];
        out[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * kl[0] + (h1 + h2) / (h1 * h2) * kl[1] - h1 / (h2 * (h1 + h2)) * kl[2];
    }
    {
        const double h1 = t[n - 2] - t[n - 3];
        const double h2 = t[n - 1] - t[n - 2];
        out[n - 1] = h2 / (h1 * (h1 + h2)) * kl[n - 3] - (h1 + h2) / (h1 * h2) * kl[n - 2] + (2 * h2 + h1) / (h2 * (h1 + h2)) * kl[n - 1];
    }
    return out;
}

double annealed_identity_rhs(const Matrix& learned_scores, const Matrix& points, const AnnealingSchedule& schedule,
                             const TargetDensity& target, double t) {
    if (points.cols() == 0) return kNaN;
    const Matrix to_annealed = learned_scores - schedule.score_batch(t, points);
    const Matrix to_target = learned_scores - target.score_batch(points);
    return to_annealed.cwiseProduct(to_target).sum() / static_cast<double>(points.cols());
}

IdentityPair annealed_identity(const ScoreModel& model, const Matrix& points, const AnnealingSchedule& schedule,
                               const TargetDensity& target, double t, double dissipation) {
    return {-dissipation, annealed_identity_rhs(model.forward(points), points, schedule, target, t)};
}

double l2_distance(const GridDensity& a, const GridDensity& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("l2_distance: grids differ");
    return std::sqrt((a.values - b.values).squaredNorm() * a.grid.cell_volume());
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("l1_distance: grids differ");
    return (a.values - b.values).cwiseAbs().sum() * a.grid.cell_volume();
}

double l2_error(const Matrix& points, const AnalyticSolution& solution, double t, const GridSpec& grid) {
    const GridDensity estimate = kde(points, grid);
    const GridDensity exact =
        grid_density_from(grid, [&](const Eigen::Ref<const Vector>& x) { return solution.log_density_at(t, x); });
    return l2_distance(estimate, exact);
}

double cosine_similarity(const Matrix& learned_scores, const Matrix& points, const TargetDensity& target) {
    const Matrix reference = target.score_batch(points);
    double acc = 0.0;
    Eigen::Index counted = 0;
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const double a = learned_scores.col(i).norm();
        const double b = reference.col(i).norm();
        if (a < 1e-12 || b < 1e-12) continue;
        acc += learned_scores.col(i).dot(reference.col(i)) / (a * b);
        ++counted;
    }
    return counted > 0 ? acc / static_cast<double>(counted) : kNaN;
}

double cosine_similarity(const ScoreModel& model, const TargetDensity& target, const Matrix& points) {
    return cosine_similarity(model.forward(points), points, target);
}

Matrix parameter_jacobian(const ScoreModel& model, const Matrix& points) {
    const int d = model.dim();
    const Eigen::Index n = points.cols();
    Matrix jac(n * d, static_cast<Eigen::Index>(model.parameter_count()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto tr = model.trace(points.col(i), Matrix(d, 0));
        for (int a = 0; a < d; ++a) {
            Matrix adj = Matrix::Zero(d, 1);
            adj(a, 0) = 1.0;
            jac.row(i * d + a) = model.backward(tr, adj, Matrix()).transpose();
        }
    }
    return jac;
}

Matrix ntk_matrix(const ScoreModel& model, const Matrix& points) {
    if (points.cols() * model.dim() > 512) throw std::invalid_argument("ntk_matrix: n * d exceeds 512");
    const Matrix jac = parameter_jacobian(model, points);
    Matrix h = jac * jac.transpose();
    return 0.5 * (h + h.transpose());
}

double ntk_min_eigenvalue(const Matrix& h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument("ntk_min_eigenvalue: matrix must be square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument("ntk_min_eigenvalue: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void finalize_records(std::vector<DiagnosticsRecord>& records) {
    if (records.size() < 3) {
        for (auto& r : records) r.dissipation = r.identity_lhs = kNaN;
        return;
    }
    std::vector<double> t, kl;
    for (const auto& r : records) {
        t.push_back(r.t);
        kl.push_back(r.kl);
    }
    const auto rate = dissipation_rate(t, kl);
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].dissipation = rate[i];
        records[i].identity_lhs = -rate[i];
    }
}

}  // namespace sbtm

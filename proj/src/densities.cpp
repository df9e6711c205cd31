#include "sbtm/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sbtm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Widens the default grid to cover [-extent, extent]^dim, keeping 1D spacing at 0.01.
GridSpec grid_covering(int dim, double extent) {
    GridSpec grid = default_grid(dim);
    if (extent > grid.hi) {
        double half = std::ceil(extent);
        if (dim == 1) grid.points = static_cast<int>(std::lround(2.0 * half / 0.01)) + 1;
        grid.lo = -half;
        grid.hi = half;
    }
    return grid;
}

}  // namespace

Matrix InitialDensity::sample(Eigen::Index n, Rng& rng) const {
    Matrix out(dim, n);
    for (Eigen::Index i = 0; i < n; ++i) out.col(i) = sampler(rng);
    return out;
}

double AnalyticSolution::variance_at(double t) const {
    return 1.0 - std::exp(-2.0 * (t + time_offset));
}

double AnalyticSolution::log_density_at(double t, const Eigen::Ref<const Vector>& x) const {
    const double var = variance_at(t);
    return -0.5 * x.squaredNorm() / var - 0.5 * dim * (kLog2Pi + std::log(var));
}

double AnalyticSolution::density_at(double t, const Eigen::Ref<const Vector>& x) const {
    return std::exp(log_density_at(t, x));
}

Vector AnalyticSolution::score_at(double t, const Eigen::Ref<const Vector>& x) const {
    return -x / variance_at(t);
}

double AnalyticSolution::kl_to_target_at(double t) const {
    const double var = variance_at(t);
    return 0.5 * dim * (var - 1.0 - std::log(var));
}

double AnalyticSolution::fisher_at(double t) const {
    const double var = variance_at(t);
    return dim * (1.0 - var) * (1.0 - var) / var;
}

double quadrature_log_normalizer(const LogDensityFn& log_density, const GridSpec& grid) {
    const std::size_t total = grid.size();
    std::vector<double> values(total);
    for (std::size_t k = 0; k < total; ++k) values[k] = log_density(grid.coords(k));
    const double peak = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - peak);
    return peak + std::log(sum * grid.cell_volume());
}

void attach_log_normalizer(TargetDensity& target) {
    if (target.dim <= 2) target.log_normalizer = quadrature_log_normalizer(target.log_density, target.grid);
}

TargetDensity make_standard_gaussian(int dim) {
    if (dim < 1) throw std::invalid_argument("make_standard_gaussian: dim must be >= 1");
    TargetDensity target;
    target.name = "gaussian";
    target.dim = dim;
    target.log_density = [](const Eigen::Ref<const Vector>& x) { return -0.5 * x.squaredNorm(); };
    target.score = [](const Eigen::Ref<const Vector>& x) -> Vector { return -x; };
    target.grid = default_grid(dim);
    attach_log_normalizer(target);
    return target;
}

InitialDensity make_gaussian_initial(int dim, double variance) {
    if (dim < 1) throw std::invalid_argument("make_gaussian_initial: dim must be >= 1");
    if (!(variance > 0.0)) throw std::invalid_argument("make_gaussian_initial: variance must be positive");
    InitialDensity init;
    init.name = "gaussian";
    init.dim = dim;
    init.score = [variance](const Eigen::Ref<const Vector>& x) -> Vector { return -x / variance; };
    init.log_density = [dim, variance](const Eigen::Ref<const Vector>& x) {
        return -0.5 * x.squaredNorm() / variance - 0.5 * dim * (kLog2Pi + std::log(variance));
    };
    const double sd = std::sqrt(variance);
    init.sampler = [dim, sd](Rng& rng) -> Vector { return sd * standard_normal(dim, 1, rng).col(0); };
    return init;
}

TargetDensity make_gaussian_mixture(std::vector<double> weights, std::vector<Vector> means,
                                    std::vector<double> variances) {
    if (weights.empty()) throw std::invalid_argument("make_gaussian_mixture: empty mixture");
    if (weights.size() != means.size() || weights.size() != variances.size())
        throw std::invalid_argument("make_gaussian_mixture: weights, means and variances differ in length");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("make_gaussian_mixture: weights must sum to 1");
    const int dim = static_cast<int>(means.front().size());
    double extent = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] > 0.0)) throw std::invalid_argument("make_gaussian_mixture: weights must be positive");
        if (!(variances[k] > 0.0)) throw std::invalid_argument("make_gaussian_mixture: variances must be positive");
        if (means[k].size() != dim) throw std::invalid_argument("make_gaussian_mixture: inconsistent mean dimensions");
        extent = std::max(extent, means[k].cwiseAbs().maxCoeff() + 8.0 * std::sqrt(variances[k]));
    }

    // log w_k + log N(x; mu_k, v_k I) for every component
    std::vector<double> log_coeff(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k)
        log_coeff[k] = std::log(weights[k]) - 0.5 * dim * (kLog2Pi + std::log(variances[k]));

    auto component_logs = [=](const Eigen::Ref<const Vector>& x, std::vector<double>& logs) {
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < logs.size(); ++k) {
            logs[k] = log_coeff[k] - 0.5 * (x - means[k]).squaredNorm() / variances[k];
            peak = std::max(peak, logs[k]);
        }
        return peak;
    };

    TargetDensity target;
    target.name = "mixture";
    target.dim = dim;
    target.log_density = [=](const Eigen::Ref<const Vector>& x) {
        std::vector<double> logs(log_coeff.size());
        const double peak = component_logs(x, logs);
        double sum = 0.0;
        for (double l : logs) sum += std::exp(l - peak);
        return peak + std::log(sum);
    };
    target.score = [=](const Eigen::Ref<const Vector>& x) -> Vector {
        std::vector<double> logs(log_coeff.size());
        const double peak = component_logs(x, logs);
        double norm = 0.0;
        Vector grad = Vector::Zero(x.size());
        for (std::size_t k = 0; k < logs.size(); ++k) {
            const double r = std::exp(logs[k] - peak);
            norm += r;
            grad -= r * (x - means[k]) / variances[k];
        }
        return grad / norm;
    };
    target.grid = grid_covering(dim, extent);
    attach_log_normalizer(target);
    return target;
}

TargetDensity make_gaussian_mixture_1d(const std::vector<double>& weights, const std::vector<double>& means,
                                       const std::vector<double>& variances) {
    std::vector<Vector> vmeans;
    for (double m : means) vmeans.push_back(Vector::Constant(1, m));
    return make_gaussian_mixture(weights, std::move(vmeans), variances);
}

TargetDensity make_noisy_circle(const Eigen::Vector2d& center, double radius, double temperature) {
    if (!(radius > 0.0)) throw std::invalid_argument("make_noisy_circle: radius must be positive");
    if (!(temperature > 0.0)) throw std::invalid_argument("make_noisy_circle: temperature must be positive");
    const Vector c = center;
    TargetDensity target;
    target.name = "noisy_circle";
    target.dim = 2;
    target.log_density = [=](const Eigen::Ref<const Vector>& x) {
        const double gap = (x - c).norm() - radius;
        return -gap * gap / temperature;
    };
    target.score = [=](const Eigen::Ref<const Vector>& x) -> Vector {
        const Vector offset = x - c;
        const double rho = offset.norm();
        if (rho == 0.0) return Vector::Zero(2);
        return (-2.0 * (rho - radius) / (temperature * rho)) * offset;
    };
    target.grid = grid_covering(2, c.cwiseAbs().maxCoeff() + radius + 6.0 * std::sqrt(temperature));
    attach_log_normalizer(target);
    return target;
}

TargetDensity make_grid_mixture(int modes_per_side, double spacing, double variance) {
    if (modes_per_side < 1) throw std::invalid_argument("make_grid_mixture: modes_per_side must be >= 1");
    const int count = modes_per_side * modes_per_side;
    std::vector<double> weights(count, 1.0 / count);
    // Renormalize in long double so the sum passes the 1e-12 check for any count.
    long double acc = 0.0L;
    for (double w : weights) acc += w;
    weights.back() += static_cast<double>(1.0L - acc);
    std::vector<Vector> means;
    const double offset = 0.5 * (modes_per_side - 1);
    for (int j = 0; j < modes_per_side; ++j)
        for (int i = 0; i < modes_per_side; ++i) means.push_back(Eigen::Vector2d((i - offset) * spacing, (j - offset) * spacing));
    TargetDensity target = make_gaussian_mixture(weights, std::move(means), std::vector<double>(count, variance));
    target.name = "grid_mixture";
    return target;
}

}  // namespace sbtm

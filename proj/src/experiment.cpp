#include "sbtm/experiment.hpp"

#include <cmath>

namespace sbtm {

TargetDensity build_target(const TargetSpec& spec) {
    if (spec.kind == "gaussian") return make_standard_gaussian(spec.dim);
    if (spec.kind == "mixture") {
        std::vector<Vector> means;
        for (const auto& m : spec.means) means.push_back(Eigen::Map<const Vector>(m.data(), static_cast<Eigen::Index>(m.size())));
        return make_gaussian_mixture(spec.weights, std::move(means), spec.variances);
    }
    if (spec.kind == "noisy_circle") {
        if (spec.center.size() != 2) throw std::invalid_argument("noisy_circle: center must have 2 coordinates");
        return make_noisy_circle({spec.center[0], spec.center[1]}, spec.radius, spec.temperature);
    }
    if (spec.kind == "grid_mixture") return make_grid_mixture(spec.modes_per_side, spec.spacing, spec.variance);
    throw std::invalid_argument("unknown target kind '" + spec.kind + "'");
}

InitialDensity build_initial(const InitialSpec& spec, int dim) {
    if (spec.kind == "gaussian") return make_gaussian_initial(dim, spec.variance);
    if (spec.kind == "analytic_gaussian") {
        AnalyticSolution a{dim, spec.time_offset};
        auto init = make_gaussian_initial(dim, a.variance_at(0.0));
        init.name = "analytic_gaussian";
        return init;
    }
    throw std::invalid_argument("unknown initial kind '" + spec.kind + "'");
}

Experiment build_experiment(const RunConfig& config) {
    Experiment e{build_target(config.target), {}, {}, {}};
    e.initial = build_initial(config.initial, e.target.dim);

    const double duration = config.schedule.duration > 0 ? config.schedule.duration : config.total_time;
    const double t_min = config.schedule.t_min > 0 ? config.schedule.t_min : config.dt;
    e.schedule = make_schedule(schedule_from_string(config.schedule.kind), duration, t_min, e.initial, e.target);

    RunOptions& o = e.options;
    o.method = config.method;
    o.n = static_cast<Eigen::Index>(config.n);
    o.sbtm.dt = config.dt;
    o.sbtm.total_time = config.total_time;
    o.sbtm.training = config.training;
    o.sbtm.deterministic = config.deterministic;
    o.sbtm.seed = config.seed;
    o.arch = config.model;
    o.arch.input_dim = e.target.dim;
    o.record_every = config.record_every;
    o.snapshot_every = config.snapshot_every;
    if (config.early_stop_fisher > 0) o.early_stop_fisher = config.early_stop_fisher;
    o.kl.estimator = config.kl_estimator;
    if (config.svgd_bandwidth > 0) o.svgd_bandwidth.fixed = config.svgd_bandwidth;
    if (config.initial.kind == "analytic_gaussian" && config.target.kind == "gaussian")
        o.analytic = AnalyticSolution{e.target.dim, config.initial.time_offset};
    return e;
}

}  // namespace sbtm

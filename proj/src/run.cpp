#include "sbtm/run.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace sbtm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Network initialization and pretraining draw from their own stream so that the
// particle stream depends only on the seed.
constexpr std::uint64_t kModelStream = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::sbtm: return "sbtm";
        case Method::sbtm_bypass: return "sbtm-bypass";
        case Method::langevin: return "langevin";
        case Method::svgd: return "svgd";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "sbtm") return Method::sbtm;
    if (name == "sbtm-bypass") return Method::sbtm_bypass;
    if (name == "langevin") return Method::langevin;
    if (name == "svgd") return Method::svgd;
    throw std::invalid_argument("unknown method '" + name + "' (expected sbtm, sbtm-bypass, langevin or svgd)");
}

RunResult run(const RunOptions& options, const TargetDensity& target, const InitialDensity& initial,
              const AnnealingSchedule& schedule, const RunObserver& observer) {
    const auto started = std::chrono::steady_clock::now();
    if (target.dim != initial.dim) throw std::invalid_argument("run: target and initial density dimensions differ");
    if (options.n < 1) throw std::invalid_argument("run: n must be >= 1");
    if (options.record_every < 1) throw std::invalid_argument("run: record_every must be >= 1");
    if (options.method == Method::sbtm_bypass && !options.analytic)
        throw std::invalid_argument("run: sbtm-bypass needs an analytic solution for the score of f_t");

    RunResult result;
    Ensemble ensemble = make_ensemble(initial, options.n, options.sbtm.seed);
    // nothing to integrate: the initial ensemble and an empty series
    if (options.sbtm.step_count() == 0) {
        result.snapshots.push_back({0, ensemble.time, ensemble.positions});
        if (observer.on_snapshot) observer.on_snapshot(result.snapshots.back());
        result.final_ensemble = std::move(ensemble);
        return result;
    }
    Rng model_rng(options.sbtm.seed ^ kModelStream);

    std::optional<ScoreModel> model;
    AdamWState optimizer;
    if (options.method == Method::sbtm) {
        Architecture arch = options.arch;
        arch.input_dim = target.dim;
        if (options.initial_model) {
            if (options.initial_model->arch() != arch) throw std::invalid_argument("run: initial model architecture mismatch");
            model = *options.initial_model;
        } else {
            model = ScoreModel::glorot(arch, model_rng);
        }
        result.pretrain = pretrain(*model, initial, options.n, options.sbtm.training, model_rng);
        optimizer = AdamWState(model->parameter_count(), options.sbtm.training.adamw);
    }

    auto analytic_field = [&](double t, const Matrix& x) {
        Matrix out(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.cols(); ++i) out.col(i) = options.analytic->score_at(t, x.col(i));
        return out;
    };
    auto learned_scores = [&]() -> Matrix {
        if (model) return model->forward(ensemble.positions);
        if (options.method == Method::sbtm_bypass) return analytic_field(ensemble.time, ensemble.positions);
        return Matrix();
    };
    const bool grid_diagnostics = target.dim <= 2 && target.log_normalizer.has_value();

    auto record = [&](int step, double loss) {
        DiagnosticsRecord r;
        r.t = ensemble.time;
        r.loss = loss;
        r.dissipation = r.identity_lhs = kNaN;
        const Matrix s = learned_scores();
        const Matrix& x = ensemble.positions;
        r.kl = grid_diagnostics ? estimate_kl(x, target, options.kl) : kNaN;
        if (s.size() > 0) {
            r.fisher = fisher_estimate(s, x, target);
            r.identity_rhs = annealed_identity_rhs(s, x, schedule, target, ensemble.time);
            r.cosine_sim = cosine_similarity(s, x, target);
        } else {
            r.fisher = r.identity_rhs = r.cosine_sim = kNaN;
        }
        r.l2_error = (options.analytic && grid_diagnostics) ? l2_error(x, *options.analytic, ensemble.time, target.grid) : kNaN;
        result.records.push_back(r);
        if (observer.on_record) observer.on_record(r, RecordContext{step, ensemble, s, model ? &*model : nullptr});
        return r.fisher;
    };
    auto snapshot = [&](int step) {
        result.snapshots.push_back({step, ensemble.time, ensemble.positions});
        if (observer.on_snapshot) observer.on_snapshot(result.snapshots.back());
    };

    record(0, kNaN);
    snapshot(0);
    const int steps = options.sbtm.step_count();
    const double dt = options.sbtm.dt;
    for (int step = 1; step <= steps; ++step) {
        double loss = kNaN;
        switch (options.method) {
            case Method::sbtm:
                loss = sbtm_step(ensemble, *model, optimizer, schedule, options.sbtm).training_loss;
                break;
            case Method::sbtm_bypass: bypass_step(ensemble, analytic_field, schedule, dt); break;
            case Method::langevin: langevin_step(ensemble, schedule, dt); break;
            case Method::svgd: svgd_step(ensemble, schedule, dt, options.svgd_bandwidth); break;
        }
        result.steps_taken = step;
        const bool last = step == steps;
        if (step % options.record_every == 0 || last) {
            const double fisher = record(step, loss);
            if (options.early_stop_fisher && std::isfinite(fisher) && fisher <= *options.early_stop_fisher)
                result.early_stopped = true;
        }
        if ((options.snapshot_every > 0 && step % options.snapshot_every == 0) || last || result.early_stopped)
            snapshot(step);
        if (result.early_stopped) break;
    }

    finalize_records(result.records);
    result.model = std::move(model);
    result.final_ensemble = std::move(ensemble);
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace sbtm

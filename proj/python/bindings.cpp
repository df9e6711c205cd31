// Python module sbtm._core. Point sets cross the boundary as (n, d) arrays; the C++ side stores d x n.
#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sbtm/commands.hpp"
#include "sbtm/fp_oracle.hpp"
#include "sbtm/io.hpp"
#include "sbtm/losses.hpp"

namespace py = pybind11;
using namespace sbtm;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix from_rows(const Eigen::Ref<const RowMatrix>& x) { return x.transpose(); }
RowMatrix to_rows(const Matrix& x) { return x.transpose(); }

py::dict record_columns(const std::vector<DiagnosticsRecord>& recs) {
    const auto n = static_cast<Eigen::Index>(recs.size());
    std::vector<Vector> cols(diagnostics_columns().size(), Vector(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& r = recs[static_cast<std::size_t>(k)];
        const double v[] = {r.t, r.loss, r.kl, r.fisher, r.dissipation, r.identity_lhs, r.identity_rhs, r.l2_error, r.cosine_sim};
        for (std::size_t c = 0; c < cols.size(); ++c) cols[c][k] = v[c];
    }
    py::dict out;
    for (std::size_t c = 0; c < cols.size(); ++c) out[py::str(diagnostics_columns()[c])] = cols[c];
    return out;
}

py::dict result_dict(const RunResult& r) {
    py::dict out;
    out["records"] = record_columns(r.records);
    py::list snaps;
    for (const auto& s : r.snapshots) snaps.append(py::make_tuple(s.step, s.t, to_rows(s.positions)));
    out["snapshots"] = snaps;
    out["positions"] = to_rows(r.final_ensemble.positions);
    out["steps_taken"] = r.steps_taken;
    out["early_stopped"] = r.early_stopped;
    out["wall_seconds"] = r.wall_seconds;
    if (r.pretrain) out["pretrain"] = py::dict(py::arg("steps") = r.pretrain->steps, py::arg("loss") = r.pretrain->loss,
                                               py::arg("converged") = r.pretrain->converged);
    out["model"] = r.model ? py::cast(*r.model) : py::none();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Score-based transport modeling: particle samplers, diagnostics and a 1D Fokker-Planck oracle";

    py::class_<Architecture>(m, "Architecture")
        .def(py::init([](int input_dim, int width, int hidden_layers, bool residual) {
                 Architecture a;
                 a.input_dim = input_dim;
                 a.width = width;
                 a.hidden_layers = hidden_layers;
                 a.residual = residual;
                 return a;
             }),
             py::arg("input_dim") = 1, py::arg("width") = 128, py::arg("hidden_layers") = 3, py::arg("residual") = true)
        .def_readwrite("input_dim", &Architecture::input_dim)
        .def_readwrite("width", &Architecture::width)
        .def_readwrite("hidden_layers", &Architecture::hidden_layers)
        .def_readwrite("residual", &Architecture::residual)
        .def_property_readonly("parameter_count", &Architecture::parameter_count)
        .def("__eq__", [](const Architecture& a, const Architecture& b) { return a == b; });

    py::class_<ScoreModel>(m, "ScoreModel")
        .def(py::init<const Architecture&>())
        .def_static("glorot", [](const Architecture& a, std::uint64_t seed) {
            Rng rng(seed);
            return ScoreModel::glorot(a, rng);
        }, py::arg("arch"), py::arg("seed") = 0)
        .def_property_readonly("arch", &ScoreModel::arch)
        .def_property_readonly("parameter_count", &ScoreModel::parameter_count)
        .def_property("params", [](const ScoreModel& s) { return Vector(s.params()); },
                      [](ScoreModel& s, const Vector& p) {
                          if (p.size() != s.params().size()) throw std::invalid_argument("params: wrong length");
                          s.params() = p;
                      })
        .def("__call__", [](const ScoreModel& s, const Eigen::Ref<const RowMatrix>& x) { return to_rows(s.forward(from_rows(x))); },
             py::arg("points"))
        .def("divergence", [](const ScoreModel& s, const Eigen::Ref<const RowMatrix>& x) { return s.divergence_exact(from_rows(x)); },
             py::arg("points"))
        .def("divergence_hutchinson", [](const ScoreModel& s, const Eigen::Ref<const RowMatrix>& x, int probes, std::uint64_t seed) {
            Rng rng(seed);
            return s.divergence_hutchinson(from_rows(x), probes, rng);
        }, py::arg("points"), py::arg("probes") = 1, py::arg("seed") = 0)
        .def("jacobian", [](const ScoreModel& s, const Vector& x) { return s.jacobian(x); }, py::arg("x"))
        .def("save", [](const ScoreModel& s, const std::string& path) { save_checkpoint(s, path); })
        .def_static("load", &load_checkpoint);

    py::class_<TargetDensity>(m, "TargetDensity")
        .def_readonly("name", &TargetDensity::name)
        .def_readonly("dim", &TargetDensity::dim)
        .def_readonly("log_normalizer", &TargetDensity::log_normalizer)
        .def("score", [](const TargetDensity& t, const Eigen::Ref<const RowMatrix>& x) { return to_rows(t.score_batch(from_rows(x))); },
             py::arg("points"))
        .def("log_density", [](const TargetDensity& t, const Eigen::Ref<const RowMatrix>& x) {
            Vector out(x.rows());
            for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = t.log_density(x.row(i).transpose());
            return out;
        }, py::arg("points"), "Unnormalized log density");

    m.def("standard_gaussian", &make_standard_gaussian, py::arg("dim") = 1);
    m.def("gaussian_mixture", [](std::vector<double> w, const std::vector<Vector>& means, std::vector<double> var) {
        return make_gaussian_mixture(std::move(w), means, std::move(var));
    }, py::arg("weights"), py::arg("means"), py::arg("variances"));
    m.def("noisy_circle", [](const Vector& c, double r, double temp) { return make_noisy_circle(Eigen::Vector2d(c), r, temp); },
          py::arg("center"), py::arg("radius") = 1.0, py::arg("temperature") = 0.08);
    m.def("grid_mixture", &make_grid_mixture, py::arg("modes_per_side") = 4, py::arg("spacing") = 8.0, py::arg("variance") = 1.0);

    py::class_<AnalyticSolution>(m, "AnalyticSolution")
        .def(py::init([](int dim, double offset) { return AnalyticSolution{dim, offset}; }), py::arg("dim") = 1,
             py::arg("time_offset") = 0.1)
        .def("variance_at", &AnalyticSolution::variance_at)
        .def("kl_to_target_at", &AnalyticSolution::kl_to_target_at)
        .def("fisher_at", &AnalyticSolution::fisher_at);

    // diagnostics
    m.def("estimate_kl", [](const Eigen::Ref<const RowMatrix>& x, const TargetDensity& t, const std::string& estimator) {
        return estimate_kl(from_rows(x), t, KlOptions{kl_estimator_from_string(estimator), {}});
    }, py::arg("points"), py::arg("target"), py::arg("estimator") = "plain");
    m.def("kde", [](const Eigen::Ref<const RowMatrix>& x, const TargetDensity& t) {
        const GridDensity g = kde(from_rows(x), t.grid);
        Vector nodes(t.grid.points);
        for (int k = 0; k < t.grid.points; ++k) nodes[k] = t.grid.node(k);
        return py::make_tuple(nodes, g.values);
    }, py::arg("points"), py::arg("target"), "KDE on the target's grid: (axis nodes, values with axis 0 fastest)");
    m.def("fisher_estimate", [](const ScoreModel& s, const Eigen::Ref<const RowMatrix>& x, const TargetDensity& t) {
        return fisher_estimate(s, from_rows(x), t);
    }, py::arg("model"), py::arg("points"), py::arg("target"));
    m.def("dissipation_rate", &dissipation_rate, py::arg("t"), py::arg("kl"));
    m.def("ntk_matrix", [](const ScoreModel& s, const Eigen::Ref<const RowMatrix>& x) { return ntk_matrix(s, from_rows(x)); },
          py::arg("model"), py::arg("points"));
    m.def("ntk_min_eigenvalue", &ntk_min_eigenvalue, py::arg("h"));
    m.def("implicit_loss", [](const ScoreModel& s, const Eigen::Ref<const RowMatrix>& x) {
        Rng rng(0);
        return implicit_loss(s, LossBatch{from_rows(x), std::nullopt}, DivergenceMode::exact(), rng);
    }, py::arg("model"), py::arg("points"));

    m.def("fp_kl_trajectory", [](const TargetDensity& t, double initial_variance, const std::vector<double>& times, double spacing) {
        const auto init = make_gaussian_initial(1, initial_variance);
        const auto sched = make_schedule(AnnealingSchedule::Kind::none, 1.0, 0.0, init, t);
        FokkerPlanck1D::Options o;
        o.spacing = spacing;
        return fp_kl_trajectory(init.log_density, t, sched, times, o);
    }, py::arg("target"), py::arg("initial_variance"), py::arg("times"), py::arg("spacing") = 0.01,
       "KL(f_t | pi) of the 1D Fokker-Planck solution started from N(0, initial_variance)");

    // configs and runs
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    m.def("load_preset", [](const std::string& name) { return emit_config(load_preset(name)); }, py::arg("name"),
          "YAML text of a preset");
    m.def("normalize_config", [](const std::string& text) { return emit_config(parse_config(text)); }, py::arg("yaml"),
          "Validates a config and returns it with every key filled in");
    m.def("run", [](const std::string& text) {
        const RunConfig cfg = parse_config(text);
        RunResult r;
        {
            py::gil_scoped_release release;
            const Experiment e = build_experiment(cfg);
            r = run(e.options, e.target, e.initial, e.schedule);
        }
        return result_dict(r);
    }, py::arg("yaml"), "Runs a YAML config in memory");
    m.def("run_to_directory", [](const std::string& text, const std::string& out) {
        const RunConfig cfg = parse_config(text);
        std::ostringstream log;
        RunOutcome o;
        {
            py::gil_scoped_release release;
            o = run_to_directory(cfg, out, log);
        }
        return py::dict(py::arg("exit_code") = o.exit_code, py::arg("status") = o.status, py::arg("error") = o.error,
                        py::arg("final_kl") = o.final_kl, py::arg("log") = log.str());
    }, py::arg("yaml"), py::arg("out"), "Runs a YAML config and writes its artifacts into `out`");
    m.def("compare_runs", [](const std::vector<std::string>& dirs, const std::string& out) {
        std::vector<std::filesystem::path> p(dirs.begin(), dirs.end());
        compare_runs(p, out);
    }, py::arg("dirs"), py::arg("out"));
    m.def("git_revision", &git_revision);
}

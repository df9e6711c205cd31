#include "sbtm/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "sbtm/io.hpp"

#ifndef SBTM_GIT_REVISION
#define SBTM_GIT_REVISION "unknown"
#endif

namespace sbtm {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kManifestVersion = 1;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_manifest(const fs::path& path, const RunConfig& config, const RunOutcome& outcome, double wall_seconds,
                    const std::vector<std::string>& artifacts) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "manifest_version" << YAML::Value << kManifestVersion;
    out << YAML::Key << "status" << YAML::Value << outcome.status;
    if (!outcome.error.empty()) out << YAML::Key << "error" << YAML::Value << outcome.error;
    out << YAML::Key << "git_revision" << YAML::Value << git_revision();
    out << YAML::Key << "wall_seconds" << YAML::Value << format_double(wall_seconds);
    if (outcome.result) {
        out << YAML::Key << "steps_taken" << YAML::Value << outcome.result->steps_taken;
        if (outcome.result->pretrain) {
            const auto& p = *outcome.result->pretrain;
            out << YAML::Key << "pretrain" << YAML::Value << YAML::BeginMap;
            out << YAML::Key << "steps" << YAML::Value << p.steps;
            out << YAML::Key << "loss" << YAML::Value << format_double(p.loss);
            out << YAML::Key << "converged" << YAML::Value << p.converged;
            out << YAML::EndMap;
        }
        out << YAML::Key << "final_kl" << YAML::Value << format_double(outcome.final_kl);
    }
    out << YAML::Key << "artifacts" << YAML::Value << YAML::Flow << artifacts;
    out << YAML::Key << "config" << YAML::Value << YAML::Load(emit_config(config));
    out << YAML::EndMap;
    write_text(path, std::string(out.c_str()) + "\n");
}

double interpolate(const std::vector<double>& t, const std::vector<double>& v, double x) {
    if (t.empty() || x < t.front() - 1e-12 || x > t.back() + 1e-12) return kNaN;
    auto it = std::lower_bound(t.begin(), t.end(), x - 1e-12);
    const auto k = static_cast<std::size_t>(it - t.begin());
    if (std::abs(t[k] - x) <= 1e-12 || k == 0) return v[k];
    const double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
    return (1 - w) * v[k - 1] + w * v[k];
}

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::string git_revision() { return SBTM_GIT_REVISION; }

double final_kl(const Matrix& positions, const TargetDensity& target) {
    if (target.dim > 2 || !target.log_normalizer) return kNaN;
    return estimate_kl(positions, target, KlOptions{KlEstimator::plain, {}});
}

RunOutcome run_to_directory(const RunConfig& config, const fs::path& out, std::ostream& log) {
    Experiment exp = build_experiment(config);
    fs::create_directories(out);
    write_text(out / "config.yaml", emit_config(config));

    std::vector<std::string> artifacts = {"config.yaml", "diagnostics.csv", "snapshots.csv", "snapshots.bin"};
    std::ofstream diag(out / "diagnostics.csv");
    std::ofstream snaps(out / "snapshots.csv");
    if (!diag || !snaps) throw std::runtime_error("cannot write into " + out.string());
    diag << diagnostics_header() << '\n';

    std::vector<DiagnosticsRecord> records;
    std::vector<Snapshot> snapshots;
    RunObserver observer;
    observer.on_record = [&](const DiagnosticsRecord& r, const RecordContext& ctx) {
        records.push_back(r);
        diag << diagnostics_row(r) << '\n' << std::flush;
        log << "step " << ctx.step << "  t=" << r.t << "  kl=" << r.kl << "  fisher=" << r.fisher << '\n';
    };
    observer.on_snapshot = [&](const Snapshot& s) {
        append_snapshot_csv(snaps, s, snapshots.empty());
        snaps.flush();
        snapshots.push_back(s);
    };

    RunOutcome outcome;
    try {
        outcome.result = run(exp.options, exp.target, exp.initial, exp.schedule, observer);
        outcome.status = outcome.result->early_stopped ? "early_stopped" : "ok";
        outcome.final_kl = final_kl(outcome.result->final_ensemble.positions, exp.target);
        records = outcome.result->records;
    } catch (const std::exception& e) {
        outcome.exit_code = 1;
        outcome.status = "failed";
        outcome.error = e.what();
        finalize_records(records);
    }
    diag.close();
    snaps.close();
    // dissipation columns are only known once the series is complete
    write_diagnostics_csv((out / "diagnostics.csv").string(), records);
    write_snapshots_binary((out / "snapshots.bin").string(), snapshots);
    if (outcome.result && outcome.result->model) {
        save_checkpoint(*outcome.result->model, (out / "model.ckpt").string());
        artifacts.push_back("model.ckpt");
    }
    const double wall = outcome.result ? outcome.result->wall_seconds : kNaN;
    write_manifest(out / "manifest.yaml", config, outcome, wall, artifacts);
    if (outcome.exit_code != 0) log << "run failed: " << outcome.error << '\n';
    return outcome;
}

std::vector<SweepCell> run_sweep(const RunConfig& base, const SweepOptions& options, const fs::path& out,
                                 std::ostream& log) {
    if (options.methods.empty()) throw std::invalid_argument("sweep: the methods list is empty");
    if (options.sizes.empty()) throw std::invalid_argument("sweep: the sizes list is empty");
    if (options.repeats < 1) throw std::invalid_argument("sweep: repeats must be >= 1");
    for (auto n : options.sizes)
        if (n < 1) throw std::invalid_argument("sweep: sample sizes must be >= 1");
    fs::create_directories(out / "cells");

    std::vector<SweepCell> cells;
    std::uint64_t index = 0;
    for (Method m : options.methods) {
        for (auto n : options.sizes) {
            for (int rep = 0; rep < options.repeats; ++rep, ++index) {
                RunConfig c = base;
                c.method = m;
                c.n = n;
                c.seed = base.seed + index;
                c.output = (out / "cells" / std::to_string(index)).string();
                SweepCell cell{m, n, rep, c.seed, kNaN, "failed"};
                log << "cell " << index << ": " << to_string(m) << " n=" << n << " seed=" << c.seed << '\n';
                try {
                    std::ostringstream quiet;
                    const RunOutcome o = run_to_directory(c, c.output, quiet);
                    cell.status = o.status;
                    if (o.exit_code == 0) cell.final_kl = o.final_kl;
                    else log << "  failed: " << o.error << '\n';
                } catch (const std::exception& e) {
                    log << "  failed: " << e.what() << '\n';
                }
                cells.push_back(cell);
            }
        }
    }

    std::ofstream long_form(out / "cells.csv");
    long_form << "cell,method,n,repeat,seed,final_kl,status\n";
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& c = cells[k];
        long_form << k << ',' << to_string(c.method) << ',' << c.n << ',' << c.repeat << ',' << c.seed << ','
                  << format_double(c.final_kl) << ',' << c.status << '\n';
    }

    std::ofstream table(out / "table.csv");
    table << "method";
    for (auto n : options.sizes) table << ',' << n;
    table << '\n';
    for (Method m : options.methods) {
        table << to_string(m);
        for (auto n : options.sizes) {
            std::vector<double> kls;
            for (const auto& c : cells)
                if (c.method == m && c.n == n) kls.push_back(c.final_kl);
            // a failed repeat poisons the cell
            const bool any_nan = std::any_of(kls.begin(), kls.end(), [](double x) { return std::isnan(x); });
            table << ',' << format_double(any_nan ? kNaN : median(kls));
        }
        table << '\n';
    }
    return cells;
}

void compare_runs(const std::vector<fs::path>& dirs, const fs::path& out_csv) {
    if (dirs.empty()) throw std::invalid_argument("compare: no run directories given");
    struct Series {
        std::string label;
        std::vector<DiagnosticsRecord> records;
    };
    std::vector<Series> runs;
    std::map<std::string, int> method_count;
    std::vector<std::string> methods;
    for (const auto& dir : dirs) {
        const fs::path manifest = dir / "manifest.yaml";
        if (!fs::exists(manifest)) throw std::runtime_error("compare: no manifest.yaml in " + dir.string());
        std::string method = "run";
        try {
            const YAML::Node m = YAML::LoadFile(manifest.string());
            if (m["config"] && m["config"]["method"]) method = m["config"]["method"].as<std::string>();
        } catch (const YAML::Exception& e) {
            throw std::runtime_error("compare: unreadable manifest in " + dir.string() + ": " + e.what());
        }
        methods.push_back(method);
        ++method_count[method];
        runs.push_back({"", read_diagnostics_csv((dir / "diagnostics.csv").string())});
    }
    std::set<std::string> used;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        std::string label = method_count[methods[k]] == 1 ? methods[k] : fs::path(dirs[k]).filename().string();
        if (label.empty()) label = fs::path(dirs[k]).parent_path().filename().string();
        std::string unique = label;
        for (int i = 2; used.count(unique); ++i) unique = label + "_" + std::to_string(i);
        used.insert(unique);
        runs[k].label = unique;
    }

    // coarsest cadence: fewest records per unit time
    std::size_t base = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& r = runs[k].records;
        if (r.size() < 2) continue;
        const double spacing = (r.back().t - r.front().t) / static_cast<double>(r.size() - 1);
        if (spacing > best) best = spacing, base = k;
    }
    std::vector<double> grid;
    for (const auto& r : runs[base].records) grid.push_back(r.t);

    const auto& cols = diagnostics_columns();
    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write " + out_csv.string());
    out << "t";
    for (const auto& run : runs)
        for (std::size_t c = 1; c < cols.size(); ++c) out << ',' << cols[c] << '_' << run.label;
    out << '\n';

    auto field = [](const DiagnosticsRecord& r, std::size_t c) {
        const double v[] = {r.t, r.loss, r.kl, r.fisher, r.dissipation, r.identity_lhs, r.identity_rhs, r.l2_error, r.cosine_sim};
        return v[c];
    };
    for (double t : grid) {
        out << format_double(t);
        for (const auto& run : runs) {
            std::vector<double> ts;
            for (const auto& r : run.records) ts.push_back(r.t);
            for (std::size_t c = 1; c < cols.size(); ++c) {
                std::vector<double> vs;
                for (const auto& r : run.records) vs.push_back(field(r, c));
                out << ',' << format_double(interpolate(ts, vs, t));
            }
        }
        out << '\n';
    }
}

}  // namespace sbtm

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbtm/config.hpp"
#include "sbtm/experiment.hpp"

namespace sbtm {

/// Build revision recorded in manifests.
std::string git_revision();

struct RunOutcome {
    int exit_code = 0;  // 0 ok (or early stop), 1 runtime failure
    std::string status;  // ok | early_stopped | failed
    std::string error;
    std::optional<RunResult> result;
    double final_kl = 0.0;  // plain estimator on the final particles; NaN when unavailable
};

/// Runs `config` and streams artifacts into `out`:
///   config.yaml, diagnostics.csv, snapshots.csv, snapshots.bin, model.ckpt (sbtm), manifest.yaml.
/// On a step failure the completed records and snapshots stay on disk and the manifest says "failed".
RunOutcome run_to_directory(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// KL of the final ensemble with the plain KDE estimator (NaN for d > 2 or no normalizer).
double final_kl(const Matrix& positions, const TargetDensity& target);

struct SweepOptions {
    std::vector<std::int64_t> sizes;
    std::vector<Method> methods;
    int repeats = 1;
};

struct SweepCell {
    Method method;
    std::int64_t n;
    int repeat;
    std::uint64_t seed;
    double final_kl;
    std::string status;
};

/// Cell k (methods outer, sizes, then repeats inner) runs with seed = base seed + k in out/cells/<k>.
/// Failed cells carry NaN. Writes out/cells.csv (long form) and out/table.csv (method x n, median over repeats).
std::vector<SweepCell> run_sweep(const RunConfig& base, const SweepOptions& options, const std::filesystem::path& out,
                                 std::ostream& log);

/// Joins the diagnostics of several run directories on t into one wide CSV with columns
/// t, <column>_<label> ... where label is the run's method (or directory name when methods repeat).
/// Series are linearly resampled onto the coarsest run's t grid.
void compare_runs(const std::vector<std::filesystem::path>& dirs, const std::filesystem::path& out_csv);

}  // namespace sbtm

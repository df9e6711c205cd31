#pragma once

#include <string>
#include <vector>

#include "sbtm/diagnostics.hpp"
#include "sbtm/run.hpp"

namespace sbtm {

/// Column names of the diagnostics CSV, in order.
const std::vector<std::string>& diagnostics_columns();

std::string diagnostics_header();
std::string diagnostics_row(const DiagnosticsRecord& r);

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path);

/// step,t,x1..xd with one row per particle.
void write_snapshot_csv(const std::string& path, const Snapshot& snapshot);
void append_snapshot_csv(std::ostream& out, const Snapshot& snapshot, bool header);

/// Binary snapshot stream (little-endian):
///   bytes 0-7  magic "SBTMSNAP", u32 version (1), u32 reserved (0)
///   per snapshot: i64 step, f64 t, u64 n, u64 d, then n * d f64 (particle-major).
void write_snapshots_binary(const std::string& path, const std::vector<Snapshot>& snapshots);
std::vector<Snapshot> read_snapshots_binary(const std::string& path);

/// x,f for 1D grids; x,y,f for 2D.
void write_grid_density_csv(const std::string& path, const GridDensity& density);

/// t,kl
void write_kl_series_csv(const std::string& path, const std::vector<double>& t, const std::vector<double>& kl);

struct NtkRecord {
    double t;
    double min_eig;
    int dim;
};

/// t,min_eig,dim
void write_ntk_csv(const std::string& path, const std::vector<NtkRecord>& records);

/// Parses a CSV with a header row into named numeric columns ("nan" allowed).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

/// Shortest round-trip formatting; NaN as "nan".
std::string format_double(double v);

}  // namespace sbtm

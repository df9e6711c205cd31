#include "sbtm/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace sbtm {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr char kSnapshotMagic[8] = {'S', 'B', 'T', 'M', 'S', 'N', 'A', 'P'};
constexpr std::uint32_t kSnapshotVersion = 1;

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const std::string& path) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error(path + ": truncated snapshot file");
    return v;
}

double parse_double(const std::string& cell, const std::string& path, std::size_t line) {
    if (cell == "nan" || cell == "NaN" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const char* end = cell.data() + cell.size();
    auto res = std::from_chars(cell.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::runtime_error(path + ":" + std::to_string(line) + ": not a number: '" + cell + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const std::vector<std::string>& diagnostics_columns() {
    static const std::vector<std::string> cols = {"t",           "loss",         "kl",       "fisher",    "dissipation",
                                                  "identity_lhs", "identity_rhs", "l2_error", "cosine_sim"};
    return cols;
}

std::string diagnostics_header() {
    std::string h;
    for (const auto& c : diagnostics_columns()) h += (h.empty() ? "" : ",") + c;
    return h;
}

std::string diagnostics_row(const DiagnosticsRecord& r) {
    const double v[] = {r.t, r.loss, r.kl, r.fisher, r.dissipation, r.identity_lhs, r.identity_rhs, r.l2_error, r.cosine_sim};
    std::string row;
    for (double x : v) row += (row.empty() ? "" : ",") + format_double(x);
    return row;
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
    auto out = open_out(path);
    out << diagnostics_header() << '\n';
    for (const auto& r : records) out << diagnostics_row(r) << '\n';
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return static_cast<int>(k);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty CSV");
    table.columns = split(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = split(line);
        if (cells.size() != table.columns.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(table.columns.size()) + " fields");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(c, path, lineno));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    std::vector<int> idx;
    for (const auto& c : diagnostics_columns()) {
        const int k = table.column(c);
        if (k < 0) throw std::runtime_error(path + ": missing column '" + c + "'");
        idx.push_back(k);
    }
    std::vector<DiagnosticsRecord> out;
    for (const auto& row : table.rows) {
        DiagnosticsRecord r;
        double* fields[] = {&r.t, &r.loss, &r.kl, &r.fisher, &r.dissipation, &r.identity_lhs, &r.identity_rhs, &r.l2_error, &r.cosine_sim};
        for (std::size_t k = 0; k < idx.size(); ++k) *fields[k] = row[static_cast<std::size_t>(idx[k])];
        out.push_back(r);
    }
    return out;
}

void append_snapshot_csv(std::ostream& out, const Snapshot& s, bool header) {
    const Eigen::Index d = s.positions.rows();
    if (header) {
        out << "step,t";
        for (Eigen::Index a = 0; a < d; ++a) out << ",x" << a + 1;
        out << '\n';
    }
    const std::string prefix = std::to_string(s.step) + "," + format_double(s.t);
    for (Eigen::Index i = 0; i < s.positions.cols(); ++i) {
        out << prefix;
        for (Eigen::Index a = 0; a < d; ++a) out << ',' << format_double(s.positions(a, i));
        out << '\n';
    }
}

void write_snapshot_csv(const std::string& path, const Snapshot& snapshot) {
    auto out = open_out(path);
    append_snapshot_csv(out, snapshot, true);
}

void write_snapshots_binary(const std::string& path, const std::vector<Snapshot>& snapshots) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kSnapshotMagic, sizeof kSnapshotMagic);
    put<std::uint32_t>(out, kSnapshotVersion);
    put<std::uint32_t>(out, 0);
    for (const auto& s : snapshots) {
        put<std::int64_t>(out, s.step);
        put<double>(out, s.t);
        put<std::uint64_t>(out, static_cast<std::uint64_t>(s.positions.cols()));
        put<std::uint64_t>(out, static_cast<std::uint64_t>(s.positions.rows()));
        // column-major d x n is already particle-major
        out.write(reinterpret_cast<const char*>(s.positions.data()),
                  static_cast<std::streamsize>(sizeof(double) * s.positions.size()));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<Snapshot> read_snapshots_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0) throw std::runtime_error(path + ": not a snapshot file");
    const auto version = get<std::uint32_t>(in, path);
    if (version != kSnapshotVersion) throw std::runtime_error(path + ": unsupported snapshot version " + std::to_string(version));
    get<std::uint32_t>(in, path);
    std::vector<Snapshot> out;
    while (in.peek() != std::char_traits<char>::eof()) {
        Snapshot s;
        s.step = static_cast<int>(get<std::int64_t>(in, path));
        s.t = get<double>(in, path);
        const auto n = get<std::uint64_t>(in, path);
        const auto d = get<std::uint64_t>(in, path);
        if (d == 0 || d > 1024 || n > (std::uint64_t{1} << 32)) throw std::runtime_error(path + ": corrupt snapshot header");
        s.positions.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
        in.read(reinterpret_cast<char*>(s.positions.data()), static_cast<std::streamsize>(sizeof(double) * n * d));
        if (!in) throw std::runtime_error(path + ": truncated snapshot file");
        out.push_back(std::move(s));
    }
    return out;
}

void write_grid_density_csv(const std::string& path, const GridDensity& density) {
    auto out = open_out(path);
    const GridSpec& g = density.grid;
    out << (g.dim == 1 ? "x,f\n" : "x,y,f\n");
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Vector x = g.coords(k);
        for (Eigen::Index a = 0; a < x.size(); ++a) out << format_double(x[a]) << ',';
        out << format_double(density.values[static_cast<Eigen::Index>(k)]) << '\n';
    }
}

void write_kl_series_csv(const std::string& path, const std::vector<double>& t, const std::vector<double>& kl) {
    if (t.size() != kl.size()) throw std::invalid_argument("write_kl_series_csv: length mismatch");
    auto out = open_out(path);
    out << "t,kl\n";
    for (std::size_t k = 0; k < t.size(); ++k) out << format_double(t[k]) << ',' << format_double(kl[k]) << '\n';
}

void write_ntk_csv(const std::string& path, const std::vector<NtkRecord>& records) {
    auto out = open_out(path);
    out << "t,min_eig,dim\n";
    for (const auto& r : records) out << format_double(r.t) << ',' << format_double(r.min_eig) << ',' << r.dim << '\n';
}

}  // namespace sbtm

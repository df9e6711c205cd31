// sbtm: run, sweep and compare particle samplers from YAML configs.
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sbtm/commands.hpp"

namespace fs = std::filesystem;
using namespace sbtm;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct ConfigFlags {
    std::string preset;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<bool> deterministic;
    std::optional<int> record_every;
    std::optional<std::int64_t> n;
    std::optional<double> total_time;
    std::string method;

    void add_to(CLI::App* cmd) {
        auto* p = cmd->add_option("--preset", preset, "Preset name (see `sbtm presets`)");
        auto* c = cmd->add_option("--config", config, "YAML run configuration");
        p->excludes(c);
        cmd->add_option("--out", out, "Output directory (overrides the config)");
        cmd->add_option("--seed", seed, "Random seed");
        cmd->add_flag("--deterministic,!--no-deterministic", deterministic, "Bit-reproducible execution");
        cmd->add_option("--record-every", record_every, "Diagnostics cadence in steps");
        cmd->add_option("-n,--particles", n, "Number of particles");
        cmd->add_option("--T", total_time, "Final time");
        cmd->add_option("--method", method, "sbtm | sbtm-bypass | langevin | svgd");
    }

    // file < SBTM_* environment < flags
    RunConfig resolve() const {
        if (preset.empty() && config.empty()) throw ConfigError("<command line>", 0, "one of --preset or --config is required");
        RunConfig cfg = preset.empty() ? load_config(config) : load_preset(preset);
        apply_env_overrides(cfg);
        if (seed) cfg.seed = *seed;
        if (deterministic) cfg.deterministic = *deterministic;
        if (record_every) cfg.record_every = *record_every;
        if (n) cfg.n = *n;
        if (total_time) cfg.total_time = *total_time;
        if (!method.empty()) cfg.method = method_from_string(method);
        if (!out.empty()) cfg.output = out;
        // re-validate the merged result
        return parse_config(emit_config(cfg), "<merged config>");
    }
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Score-based transport modeling and baseline particle samplers"};
    app.require_subcommand(1);

    ConfigFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "Run one configuration and write its artifacts");
    run_flags.add_to(run_cmd);

    ConfigFlags sweep_flags;
    std::string sizes = "100,1000";
    std::string methods = "sbtm,langevin";
    int repeats = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "Final KL over a grid of methods and sample sizes");
    sweep_flags.add_to(sweep_cmd);
    sweep_cmd->add_option("--sizes", sizes, "Comma-separated sample sizes")->capture_default_str();
    sweep_cmd->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
    sweep_cmd->add_option("--repeats", repeats, "Seeds per cell (the table reports the median)")->capture_default_str();

    std::vector<std::string> dirs;
    std::string compare_out = "compare.csv";
    auto* compare_cmd = app.add_subcommand("compare", "Join the diagnostics of several runs into one wide CSV");
    compare_cmd->add_option("dirs", dirs, "Run directories")->required();
    compare_cmd->add_option("--out", compare_out, "Output CSV")->capture_default_str();

    auto* presets_cmd = app.add_subcommand("presets", "List available presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run_cmd) {
            RunConfig cfg;
            try {
                cfg = run_flags.resolve();
            } catch (const ConfigError& e) {
                std::cerr << "invalid config: " << e.what() << '\n';
                return kExitUsage;
            } catch (const std::invalid_argument& e) {
                std::cerr << "invalid config: " << e.what() << '\n';
                return kExitUsage;
            }
            const RunOutcome o = run_to_directory(cfg, cfg.output, std::cout);
            std::cout << o.status << ": " << cfg.output << "  final_kl=" << o.final_kl << '\n';
            return o.exit_code;
        }
        if (*sweep_cmd) {
            RunConfig cfg;
            SweepOptions opts;
            try {
                cfg = sweep_flags.resolve();
                for (const auto& m : split_list(methods)) opts.methods.push_back(method_from_string(m));
                for (const auto& n : split_list(sizes)) opts.sizes.push_back(std::stoll(n));
                opts.repeats = repeats;
                if (opts.methods.empty()) throw std::invalid_argument("sweep: the methods list is empty");
                if (opts.sizes.empty()) throw std::invalid_argument("sweep: the sizes list is empty");
            } catch (const std::exception& e) {
                std::cerr << "invalid sweep: " << e.what() << '\n';
                return kExitUsage;
            }
            run_sweep(cfg, opts, cfg.output, std::cout);
            std::cout << "table: " << (fs::path(cfg.output) / "table.csv").string() << '\n';
            return 0;
        }
        if (*compare_cmd) {
            std::vector<fs::path> paths(dirs.begin(), dirs.end());
            compare_runs(paths, compare_out);
            std::cout << compare_out << '\n';
            return 0;
        }
        if (*presets_cmd) {
            std::vector<std::string> names;
            for (const auto& entry : fs::directory_iterator(preset_directory()))
                if (entry.path().extension() == ".yaml") names.push_back(entry.path().stem().string());
            std::sort(names.begin(), names.end());
            for (const auto& n : names) std::cout << n << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}

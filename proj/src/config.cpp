#include "sbtm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#ifndef SBTM_DEFAULT_PRESET_DIR
#define SBTM_DEFAULT_PRESET_DIR "presets"
#endif

namespace sbtm {

namespace {

constexpr int kSchemaVersion = 1;

std::string format_message(const std::string& source, int line, const std::string& message) {
    if (line > 0) return source + ":" + std::to_string(line) + ": " + message;
    return source + ": " + message;
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
        const int line = node.IsDefined() ? node.Mark().line + 1 : 0;
        throw ConfigError(source_, line, message);
    }

    void require_map(const YAML::Node& node, const std::string& where) const {
        if (!node.IsMap()) fail(node, "'" + where + "' must be a mapping");
    }

    // Unknown keys are errors so that typos do not silently fall back to defaults.
    void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) const {
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) {
                std::string msg = "unknown key '" + key + "'";
                if (!where.empty()) msg += " in '" + where + "'";
                fail(kv.first, msg);
            }
        }
    }

    template <class T>
    void read(const YAML::Node& map, const std::string& key, T& out) const {
        const YAML::Node node = map[key];
        if (!node) return;
        if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
        try {
            out = node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, "'" + key + "' has invalid value '" + node.Scalar() + "'");
        }
    }

    void read(const YAML::Node& map, const std::string& key, std::vector<double>& out) const {
        const YAML::Node node = map[key];
        if (!node) return;
        if (!node.IsSequence()) fail(node, "'" + key + "' must be a list of numbers");
        out.clear();
        for (const auto& item : node) {
            try {
                out.push_back(item.as<double>());
            } catch (const YAML::Exception&) {
                fail(item, "'" + key + "' entries must be numbers");
            }
        }
    }

    template <class E, class Parse>
    void read_enum(const YAML::Node& map, const std::string& key, E& out, Parse parse) const {
        const YAML::Node node = map[key];
        if (!node) return;
        try {
            out = parse(node.as<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(node, e.what());
        } catch (const YAML::Exception&) {
            fail(node, "'" + key + "' must be a string");
        }
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
};

#define SBTM_EXPECT(reader, map, key, cond, msg)                             \
    do {                                                                     \
        if (!(cond)) {                                                       \
            const YAML::Node n_ = (map)[key];                                \
            (reader).fail(n_.IsDefined() ? n_ : (map), msg);                 \
        }                                                                    \
    } while (0)

void parse_target(const Reader& r, const YAML::Node& node, TargetSpec& t) {
    r.require_map(node, "target");
    r.read(node, "kind", t.kind);
    if (t.kind == "gaussian") {
        r.check_keys(node, {"kind", "dim"}, "target");
        r.read(node, "dim", t.dim);
        SBTM_EXPECT(r, node, "dim", t.dim >= 1, "target dim must be >= 1");
    } else if (t.kind == "mixture") {
        r.check_keys(node, {"kind", "dim", "weights", "means", "variances"}, "target");
        r.read(node, "dim", t.dim);
        SBTM_EXPECT(r, node, "dim", t.dim >= 1, "target dim must be >= 1");
        r.read(node, "weights", t.weights);
        r.read(node, "variances", t.variances);
        const YAML::Node means = node["means"];
        if (!means || !means.IsSequence()) r.fail(means.IsDefined() ? means : node, "mixture target needs a 'means' list");
        t.means.clear();
        for (const auto& m : means) {
            std::vector<double> mu;
            try {
                if (m.IsSequence()) {
                    for (const auto& c : m) mu.push_back(c.as<double>());
                } else {
                    mu.push_back(m.as<double>());
                }
            } catch (const YAML::Exception&) {
                r.fail(m, "mixture means must be numbers or lists of numbers");
            }
            if (static_cast<int>(mu.size()) != t.dim) r.fail(m, "mixture mean has wrong dimension");
            t.means.push_back(std::move(mu));
        }
        SBTM_EXPECT(r, node, "weights", !t.weights.empty(), "mixture needs at least one component");
        SBTM_EXPECT(r, node, "means", t.means.size() == t.weights.size(), "mixture 'means' and 'weights' differ in length");
        SBTM_EXPECT(r, node, "variances", t.variances.size() == t.weights.size(),
                    "mixture 'variances' and 'weights' differ in length");
        double total = 0.0;
        for (double w : t.weights) total += w;
        SBTM_EXPECT(r, node, "weights", std::abs(total - 1.0) <= 1e-9, "mixture weights must sum to 1");
        SBTM_EXPECT(r, node, "weights", std::all_of(t.weights.begin(), t.weights.end(), [](double w) { return w > 0; }),
                    "mixture weights must be positive");
        SBTM_EXPECT(r, node, "variances",
                    std::all_of(t.variances.begin(), t.variances.end(), [](double v) { return v > 0; }),
                    "mixture variances must be positive");
    } else if (t.kind == "noisy_circle") {
        r.check_keys(node, {"kind", "center", "radius", "temperature"}, "target");
        t.dim = 2;
        r.read(node, "center", t.center);
        r.read(node, "radius", t.radius);
        r.read(node, "temperature", t.temperature);
        SBTM_EXPECT(r, node, "center", t.center.size() == 2, "noisy_circle center must have 2 coordinates");
        SBTM_EXPECT(r, node, "radius", t.radius > 0, "radius must be positive");
        SBTM_EXPECT(r, node, "temperature", t.temperature > 0, "temperature must be positive");
    } else if (t.kind == "grid_mixture") {
        r.check_keys(node, {"kind", "modes_per_side", "spacing", "variance"}, "target");
        t.dim = 2;
        r.read(node, "modes_per_side", t.modes_per_side);
        r.read(node, "spacing", t.spacing);
        r.read(node, "variance", t.variance);
        SBTM_EXPECT(r, node, "modes_per_side", t.modes_per_side >= 1, "modes_per_side must be >= 1");
        SBTM_EXPECT(r, node, "spacing", t.spacing > 0, "spacing must be positive");
        SBTM_EXPECT(r, node, "variance", t.variance > 0, "variance must be positive");
    } else {
        r.fail(node["kind"].IsDefined() ? node["kind"] : node,
               "unknown target kind '" + t.kind + "' (expected gaussian, mixture, noisy_circle or grid_mixture)");
    }
}

void parse_initial(const Reader& r, const YAML::Node& node, InitialSpec& s) {
    r.require_map(node, "initial");
    r.check_keys(node, {"kind", "variance", "time_offset"}, "initial");
    r.read(node, "kind", s.kind);
    r.read(node, "variance", s.variance);
    r.read(node, "time_offset", s.time_offset);
    SBTM_EXPECT(r, node, "kind", s.kind == "gaussian" || s.kind == "analytic_gaussian",
                "unknown initial kind '" + s.kind + "' (expected gaussian or analytic_gaussian)");
    SBTM_EXPECT(r, node, "variance", s.variance > 0, "initial variance must be positive");
    SBTM_EXPECT(r, node, "time_offset", s.time_offset > 0, "time_offset must be positive");
}

void parse_schedule(const Reader& r, const YAML::Node& node, ScheduleSpec& s) {
    r.require_map(node, "schedule");
    r.check_keys(node, {"kind", "duration", "t_min"}, "schedule");
    r.read(node, "kind", s.kind);
    r.read(node, "duration", s.duration);
    r.read(node, "t_min", s.t_min);
    try {
        schedule_from_string(s.kind);
    } catch (const std::invalid_argument& e) {
        r.fail(node["kind"], e.what());
    }
    SBTM_EXPECT(r, node, "duration", s.duration >= 0, "schedule duration must be >= 0 (0 means the final time)");
    SBTM_EXPECT(r, node, "t_min", s.t_min >= 0, "schedule t_min must be >= 0 (0 means dt)");
}

void parse_model(const Reader& r, const YAML::Node& node, Architecture& a) {
    r.require_map(node, "model");
    r.check_keys(node, {"width", "hidden_layers", "activation", "residual"}, "model");
    r.read(node, "width", a.width);
    r.read(node, "hidden_layers", a.hidden_layers);
    r.read(node, "residual", a.residual);
    r.read_enum(node, "activation", a.activation, activation_from_string);
    SBTM_EXPECT(r, node, "width", a.width >= 1, "model width must be >= 1");
    SBTM_EXPECT(r, node, "hidden_layers", a.hidden_layers >= 0, "hidden_layers must be >= 0");
}

void parse_training(const Reader& r, const YAML::Node& node, TrainingConfig& t) {
    r.require_map(node, "training");
    r.check_keys(node,
                 {"inner_steps", "batch_size", "loss", "divergence", "probes", "dsm_sigma", "learning_rate", "beta1",
                  "beta2", "epsilon", "weight_decay", "pretrain_tolerance", "pretrain_max_steps",
                  "pretrain_learning_rate", "pretrain_check_every"},
                 "training");
    r.read(node, "inner_steps", t.inner_steps);
    r.read(node, "batch_size", t.batch_size);
    r.read_enum(node, "loss", t.loss, loss_from_string);
    std::string divergence = t.divergence.kind == DivergenceMode::Kind::exact ? "exact" : "hutchinson";
    r.read(node, "divergence", divergence);
    if (divergence == "exact") {
        t.divergence.kind = DivergenceMode::Kind::exact;
    } else if (divergence == "hutchinson") {
        t.divergence.kind = DivergenceMode::Kind::hutchinson;
    } else {
        r.fail(node["divergence"], "unknown divergence mode '" + divergence + "' (expected exact or hutchinson)");
    }
    r.read(node, "probes", t.divergence.probes);
    r.read(node, "dsm_sigma", t.dsm_sigma);
    r.read(node, "learning_rate", t.adamw.learning_rate);
    r.read(node, "beta1", t.adamw.beta1);
    r.read(node, "beta2", t.adamw.beta2);
    r.read(node, "epsilon", t.adamw.epsilon);
    r.read(node, "weight_decay", t.adamw.weight_decay);
    r.read(node, "pretrain_tolerance", t.pretrain_tolerance);
    r.read(node, "pretrain_max_steps", t.pretrain_max_steps);
    r.read(node, "pretrain_learning_rate", t.pretrain_learning_rate);
    r.read(node, "pretrain_check_every", t.pretrain_check_every);

    SBTM_EXPECT(r, node, "inner_steps", t.inner_steps >= 0, "inner_steps must be >= 0");
    SBTM_EXPECT(r, node, "batch_size", t.batch_size >= 0, "batch_size must be >= 0 (0 means the whole ensemble)");
    SBTM_EXPECT(r, node, "loss", t.loss != LossKind::explicit_mse,
                "the explicit loss needs the unknown score of the particle law; use implicit or denoising");
    SBTM_EXPECT(r, node, "probes", t.divergence.probes >= 1, "probes must be >= 1");
    SBTM_EXPECT(r, node, "dsm_sigma", t.dsm_sigma > 0, "dsm_sigma must be positive");
    SBTM_EXPECT(r, node, "learning_rate", t.adamw.learning_rate > 0, "learning_rate must be positive");
    SBTM_EXPECT(r, node, "beta1", t.adamw.beta1 >= 0 && t.adamw.beta1 < 1, "beta1 must be in [0, 1)");
    SBTM_EXPECT(r, node, "beta2", t.adamw.beta2 >= 0 && t.adamw.beta2 < 1, "beta2 must be in [0, 1)");
    SBTM_EXPECT(r, node, "epsilon", t.adamw.epsilon > 0, "epsilon must be positive");
    SBTM_EXPECT(r, node, "weight_decay", t.adamw.weight_decay >= 0, "weight_decay must be >= 0");
    SBTM_EXPECT(r, node, "pretrain_max_steps", t.pretrain_max_steps >= 0, "pretrain_max_steps must be >= 0");
    SBTM_EXPECT(r, node, "pretrain_learning_rate", t.pretrain_learning_rate > 0,
                "pretrain_learning_rate must be positive");
    SBTM_EXPECT(r, node, "pretrain_check_every", t.pretrain_check_every >= 1, "pretrain_check_every must be >= 1");
}

void parse_diagnostics(const Reader& r, const YAML::Node& node, RunConfig& c) {
    r.require_map(node, "diagnostics");
    r.check_keys(node, {"record_every", "snapshot_every", "kl_estimator", "early_stop_fisher", "svgd_bandwidth"},
                 "diagnostics");
    r.read(node, "record_every", c.record_every);
    r.read(node, "snapshot_every", c.snapshot_every);
    r.read_enum(node, "kl_estimator", c.kl_estimator, kl_estimator_from_string);
    r.read(node, "early_stop_fisher", c.early_stop_fisher);
    r.read(node, "svgd_bandwidth", c.svgd_bandwidth);
    SBTM_EXPECT(r, node, "record_every", c.record_every >= 1, "record_every must be >= 1");
    SBTM_EXPECT(r, node, "snapshot_every", c.snapshot_every >= 0, "snapshot_every must be >= 0");
    SBTM_EXPECT(r, node, "early_stop_fisher", c.early_stop_fisher >= 0, "early_stop_fisher must be >= 0");
    SBTM_EXPECT(r, node, "svgd_bandwidth", c.svgd_bandwidth >= 0, "svgd_bandwidth must be >= 0");
}

RunConfig parse_root(const YAML::Node& root, const Reader& r) {
    if (!root.IsMap()) throw ConfigError(r.source(), root.IsDefined() ? root.Mark().line + 1 : 0,
                                         "config must be a mapping");
    r.check_keys(root,
                 {"version", "name", "method", "target", "initial", "n", "dt", "T", "schedule", "model", "training",
                  "diagnostics", "seed", "deterministic", "output"},
                 "");
    RunConfig c;
    r.read(root, "version", c.version);
    SBTM_EXPECT(r, root, "version", c.version == kSchemaVersion,
                "unsupported config version " + std::to_string(c.version) + " (this build reads version 1)");
    r.read(root, "name", c.name);
    r.read_enum(root, "method", c.method, method_from_string);
    if (root["target"]) parse_target(r, root["target"], c.target);
    if (root["initial"]) parse_initial(r, root["initial"], c.initial);
    r.read(root, "n", c.n);
    r.read(root, "dt", c.dt);
    r.read(root, "T", c.total_time);
    if (root["schedule"]) parse_schedule(r, root["schedule"], c.schedule);
    if (root["model"]) parse_model(r, root["model"], c.model);
    if (root["training"]) parse_training(r, root["training"], c.training);
    if (root["diagnostics"]) parse_diagnostics(r, root["diagnostics"], c);
    r.read(root, "seed", c.seed);
    r.read(root, "deterministic", c.deterministic);
    r.read(root, "output", c.output);

    SBTM_EXPECT(r, root, "n", c.n >= 1, "n must be >= 1");
    SBTM_EXPECT(r, root, "dt", c.dt > 0, "dt must be positive");
    SBTM_EXPECT(r, root, "T", c.total_time > 0, "T must be positive");
    SBTM_EXPECT(r, root, "T", c.total_time >= c.dt, "T must be at least dt");
    SBTM_EXPECT(r, root, "initial", c.initial.kind != "analytic_gaussian" || c.target.kind == "gaussian",
                "analytic_gaussian initial density requires a gaussian target");
    SBTM_EXPECT(r, root, "method", c.method != Method::sbtm_bypass || c.initial.kind == "analytic_gaussian",
                "sbtm-bypass needs the analytic_gaussian initial density");
    SBTM_EXPECT(r, root, "method", c.method != Method::sbtm_bypass || c.schedule.kind == "none",
                "sbtm-bypass supports only the 'none' schedule");
    return c;
}

std::string number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    // keep it a float in YAML's eyes
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void emit_list(YAML::Emitter& out, const std::vector<double>& values) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double v : values) out << number(v);
    out << YAML::EndSeq;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(format_message(source, line, message)), line_(line) {}

RunConfig parse_config(const std::string& text, const std::string& source) {
    Reader reader(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line + 1, e.msg);
    }
    try {
        return parse_root(root, reader);
    } catch (const ConfigError&) {
        throw;
    } catch (const YAML::Exception& e) {
        throw ConfigError(source, e.mark.is_null() ? 0 : e.mark.line + 1, e.msg);
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

std::string emit_config(const RunConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "version" << YAML::Value << c.version;
    out << YAML::Key << "name" << YAML::Value << c.name;
    out << YAML::Key << "method" << YAML::Value << to_string(c.method);

    out << YAML::Key << "target" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << c.target.kind;
    if (c.target.kind == "gaussian" || c.target.kind == "mixture")
        out << YAML::Key << "dim" << YAML::Value << c.target.dim;
    if (c.target.kind == "mixture") {
        out << YAML::Key << "weights" << YAML::Value;
        emit_list(out, c.target.weights);
        out << YAML::Key << "means" << YAML::Value << YAML::BeginSeq;
        for (const auto& m : c.target.means) {
            if (c.target.dim == 1) out << number(m.at(0));
            else emit_list(out, m);
        }
        out << YAML::EndSeq;
        out << YAML::Key << "variances" << YAML::Value;
        emit_list(out, c.target.variances);
    } else if (c.target.kind == "noisy_circle") {
        out << YAML::Key << "center" << YAML::Value;
        emit_list(out, c.target.center);
        out << YAML::Key << "radius" << YAML::Value << number(c.target.radius);
        out << YAML::Key << "temperature" << YAML::Value << number(c.target.temperature);
    } else if (c.target.kind == "grid_mixture") {
        out << YAML::Key << "modes_per_side" << YAML::Value << c.target.modes_per_side;
        out << YAML::Key << "spacing" << YAML::Value << number(c.target.spacing);
        out << YAML::Key << "variance" << YAML::Value << number(c.target.variance);
    }
    out << YAML::EndMap;

    out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << c.initial.kind;
    out << YAML::Key << "variance" << YAML::Value << number(c.initial.variance);
    out << YAML::Key << "time_offset" << YAML::Value << number(c.initial.time_offset);
    out << YAML::EndMap;

    out << YAML::Key << "n" << YAML::Value << c.n;
    out << YAML::Key << "dt" << YAML::Value << number(c.dt);
    out << YAML::Key << "T" << YAML::Value << number(c.total_time);

    out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << c.schedule.kind;
    out << YAML::Key << "duration" << YAML::Value << number(c.schedule.duration);
    out << YAML::Key << "t_min" << YAML::Value << number(c.schedule.t_min);
    out << YAML::EndMap;

    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "width" << YAML::Value << c.model.width;
    out << YAML::Key << "hidden_layers" << YAML::Value << c.model.hidden_layers;
    out << YAML::Key << "activation" << YAML::Value << to_string(c.model.activation);
    out << YAML::Key << "residual" << YAML::Value << c.model.residual;
    out << YAML::EndMap;

    const auto& t = c.training;
    out << YAML::Key << "training" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "inner_steps" << YAML::Value << t.inner_steps;
    out << YAML::Key << "batch_size" << YAML::Value << t.batch_size;
    out << YAML::Key << "loss" << YAML::Value << to_string(t.loss);
    out << YAML::Key << "divergence" << YAML::Value
        << (t.divergence.kind == DivergenceMode::Kind::exact ? "exact" : "hutchinson");
    out << YAML::Key << "probes" << YAML::Value << t.divergence.probes;
    out << YAML::Key << "dsm_sigma" << YAML::Value << number(t.dsm_sigma);
    out << YAML::Key << "learning_rate" << YAML::Value << number(t.adamw.learning_rate);
    out << YAML::Key << "beta1" << YAML::Value << number(t.adamw.beta1);
    out << YAML::Key << "beta2" << YAML::Value << number(t.adamw.beta2);
    out << YAML::Key << "epsilon" << YAML::Value << number(t.adamw.epsilon);
    out << YAML::Key << "weight_decay" << YAML::Value << number(t.adamw.weight_decay);
    out << YAML::Key << "pretrain_tolerance" << YAML::Value << number(t.pretrain_tolerance);
    out << YAML::Key << "pretrain_max_steps" << YAML::Value << t.pretrain_max_steps;
    out << YAML::Key << "pretrain_learning_rate" << YAML::Value << number(t.pretrain_learning_rate);
    out << YAML::Key << "pretrain_check_every" << YAML::Value << t.pretrain_check_every;
    out << YAML::EndMap;

    out << YAML::Key << "diagnostics" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "record_every" << YAML::Value << c.record_every;
    out << YAML::Key << "snapshot_every" << YAML::Value << c.snapshot_every;
    out << YAML::Key << "kl_estimator" << YAML::Value << to_string(c.kl_estimator);
    out << YAML::Key << "early_stop_fisher" << YAML::Value << number(c.early_stop_fisher);
    out << YAML::Key << "svgd_bandwidth" << YAML::Value << number(c.svgd_bandwidth);
    out << YAML::EndMap;

    out << YAML::Key << "seed" << YAML::Value << c.seed;
    out << YAML::Key << "deterministic" << YAML::Value << c.deterministic;
    out << YAML::Key << "output" << YAML::Value << c.output;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

namespace {

// Collects every scalar of the emitted config under its env-style name.
void collect_scalars(YAML::Node node, const std::string& prefix, std::map<std::string, YAML::Node>& out) {
    for (auto kv : node) {
        std::string key = kv.first.as<std::string>();
        std::string name = prefix.empty() ? key : prefix + "_" + key;
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
        if (kv.second.IsMap()) collect_scalars(kv.second, name, out);
        else if (kv.second.IsScalar()) out.emplace(name, kv.second);
    }
}

}  // namespace

std::vector<std::string> apply_env_overrides(
    RunConfig& config, const std::function<std::optional<std::string>(const std::string&)>& getenv) {
    YAML::Node root = YAML::Load(emit_config(config));
    std::map<std::string, YAML::Node> scalars;
    collect_scalars(root, "", scalars);
    std::vector<std::string> applied;
    for (auto& [name, node] : scalars) {
        const std::string var = "SBTM_" + name;
        if (auto value = getenv(var)) {
            node = *value;
            applied.push_back(var);
        }
    }
    if (applied.empty()) return applied;
    YAML::Emitter out;
    out << root;
    config = parse_config(out.c_str(), "environment (" + applied.front() + (applied.size() > 1 ? ", ..." : "") + ")");
    return applied;
}

std::vector<std::string> apply_env_overrides(RunConfig& config) {
    return apply_env_overrides(config, [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    });
}

std::string preset_directory() {
    if (const char* dir = std::getenv("SBTM_PRESET_DIR")) return dir;
    return SBTM_DEFAULT_PRESET_DIR;
}

RunConfig load_preset(const std::string& name) {
    const auto path = std::filesystem::path(preset_directory()) / (name + ".yaml");
    if (!std::filesystem::exists(path)) throw ConfigError(path.string(), 0, "no preset named '" + name + "'");
    return load_config(path.string());
}

}  // namespace sbtm

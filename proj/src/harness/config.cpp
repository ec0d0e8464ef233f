#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "lmgcd/harness.hpp"
#include "lmgcd/oracle.hpp"

namespace lmgcd::harness {

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
    static const std::vector<std::pair<Experiment, std::string>> names{
        {Experiment::Spectrum, "spectrum"}, {Experiment::Freeze, "freeze"},     {Experiment::Entangle, "entangle"},
        {Experiment::Squeeze, "squeeze"},   {Experiment::Localize, "localize"}, {Experiment::ChaosMap, "chaosmap"},
        {Experiment::Anneal, "anneal"},     {Experiment::OracleCheck, "oracle-check"},
    };
    return names;
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& problem) const {
        std::ostringstream msg;
        msg << source_;
        if (node.Mark().line >= 0) msg << ':' << node.Mark().line + 1;
        msg << ": " << field << ": " << problem;
        throw ConfigError(msg.str());
    }

    template <typename T>
    T scalar(const YAML::Node& node, const std::string& field, const char* kind) const {
        if (!node.IsScalar()) fail(node, field, std::string("expected ") + kind);
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, field, std::string("expected ") + kind + ", got '" + node.Scalar() + "'");
        }
    }

    int integer(const YAML::Node& node, const std::string& field) const { return scalar<int>(node, field, "an integer"); }
    double real(const YAML::Node& node, const std::string& field) const { return scalar<double>(node, field, "a number"); }
    std::string text(const YAML::Node& node, const std::string& field) const {
        return scalar<std::string>(node, field, "a string");
    }

    template <typename T, typename F>
    std::vector<T> list(const YAML::Node& node, const std::string& field, F&& item) const {
        if (!node.IsSequence()) fail(node, field, "expected a list");
        if (node.size() == 0) fail(node, field, "list must not be empty");
        std::vector<T> out;
        for (std::size_t i = 0; i < node.size(); ++i) out.push_back(item(node[i], field + "[" + std::to_string(i) + "]"));
        return out;
    }

    CdLevel level(const YAML::Node& node, const std::string& field) const {
        const std::string t = text(node, field);
        try {
            return parse_cd_level(t);
        } catch (const ParameterError& e) {
            fail(node, field, e.what());
        }
    }

    std::vector<double> couplings(const YAML::Node& node, const std::string& field) const {
        std::vector<double> out;
        if (node.IsMap()) {
            for (const auto& kv : node) {
                const std::string k = kv.first.as<std::string>();
                if (k != "start" && k != "stop" && k != "count") fail(kv.first, field, "unknown key '" + k + "'");
            }
            if (!node["start"] || !node["stop"] || !node["count"]) fail(node, field, "needs start, stop and count");
            const double start = real(node["start"], field + ".start");
            const double stop = real(node["stop"], field + ".stop");
            const int count = integer(node["count"], field + ".count");
            if (count < 1) fail(node["count"], field + ".count", "must be >= 1");
            if (count > 1 && !(stop > start)) fail(node, field, "stop must exceed start");
            for (int i = 0; i < count; ++i) out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
        } else {
            out = list<double>(node, field, [&](const YAML::Node& n, const std::string& f) { return real(n, f); });
        }
        for (double j : out)
            if (!(j > 0.0)) fail(node, field, "couplings must be positive");
        return out;
    }

private:
    std::string source_;
};

nlohmann::json to_json(const YAML::Node& node) {
    if (node.IsMap()) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& kv : node) out[kv.first.as<std::string>()] = to_json(kv.second);
        return out;
    }
    if (node.IsSequence()) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& item : node) out.push_back(to_json(item));
        return out;
    }
    if (!node.IsScalar()) return nullptr;
    const std::string& s = node.Scalar();
    long long i = 0;
    double d = 0.0;
    bool b = false;
    if (YAML::convert<long long>::decode(node, i)) return i;
    if (YAML::convert<double>::decode(node, d)) return d;
    if (YAML::convert<bool>::decode(node, b)) return b;
    return s;
}

const std::set<std::string> kDriveKeys{"experiment", "n_particles", "tau",       "steps_per_period", "integrator",
                                       "tolerance",  "max_steps",   "couplings", "cd_levels",        "seed"};

}  // namespace

std::string to_string(Experiment experiment) {
    for (const auto& [e, name] : experiment_names())
        if (e == experiment) return name;
    return "unknown";
}

Experiment parse_experiment(const std::string& text) {
    for (const auto& [e, name] : experiment_names())
        if (name == text) return e;
    std::string known;
    for (const auto& [e, name] : experiment_names()) known += (known.empty() ? "" : ", ") + name;
    throw ConfigError("unknown experiment '" + text + "' (expected one of " + known + ")");
}

const std::vector<Experiment>& all_experiments() {
    static const std::vector<Experiment> all = [] {
        std::vector<Experiment> v;
        for (const auto& [e, name] : experiment_names()) v.push_back(e);
        return v;
    }();
    return all;
}

std::set<std::string> allowed_keys(Experiment experiment) {
    std::set<std::string> keys = kDriveKeys;
    switch (experiment) {
        case Experiment::Spectrum: break;
        case Experiment::Freeze: keys.insert({"periods", "trace_couplings"}); break;
        case Experiment::Entangle:
            keys.insert({"periods", "samples_per_period", "block_sizes", "block_stride", "transient"});
            break;
        case Experiment::Squeeze: keys.insert({"periods", "transient"}); break;
        case Experiment::Localize: keys.insert({"grid_theta", "grid_phi"}); break;
        case Experiment::ChaosMap: keys.insert({"map_theta", "map_phi", "window_start", "window_end"}); break;
        case Experiment::Anneal: keys.insert("cycles"); break;
        case Experiment::OracleCheck: keys.insert({"periods", "oracle_cases", "husimi_angles"}); break;
    }
    return keys;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source, const std::string& experiment_hint) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": syntax: " + e.msg);
    }
    const Reader r(source);
    if (!root.IsMap()) r.fail(root, "config", "top level must be a mapping");

    ExperimentConfig c;
    c.source = source;
    std::string name = experiment_hint;
    if (root["experiment"]) {
        const std::string declared = r.text(root["experiment"], "experiment");
        if (!name.empty() && declared != name)
            r.fail(root["experiment"], "experiment", "config is for '" + declared + "' but '" + name + "' was requested");
        name = declared;
    }
    if (name.empty()) r.fail(root, "experiment", "missing (set it in the config or on the command line)");
    try {
        c.experiment = parse_experiment(name);
    } catch (const ConfigError& e) {
        r.fail(root["experiment"] ? root["experiment"] : root, "experiment", e.what());
    }
    if (c.experiment == Experiment::OracleCheck) {
        c.couplings = {2.0};
        c.drive.steps_per_period = 256;
        c.periods = 10;
    }

    const auto keys = allowed_keys(c.experiment);
    for (const auto& kv : root) {
        const std::string key = kv.first.as<std::string>();
        if (!keys.count(key)) r.fail(kv.first, key, "unknown key for experiment '" + name + "'");
    }

    auto positive = [&](const char* key, int& target, int minimum = 1) {
        if (!root[key]) return;
        target = r.integer(root[key], key);
        if (target < minimum) r.fail(root[key], key, "must be >= " + std::to_string(minimum));
    };

    positive("n_particles", c.drive.n_particles);
    if (c.drive.n_particles > kMaxParticles)
        r.fail(root["n_particles"], "n_particles", "must be <= " + std::to_string(kMaxParticles));
    if (root["tau"]) {
        c.drive.tau = r.real(root["tau"], "tau");
        if (!(c.drive.tau > 0.0)) r.fail(root["tau"], "tau", "must be positive");
    }
    positive("steps_per_period", c.drive.steps_per_period, 16);
    positive("max_steps", c.drive.max_steps, 16);
    if (c.drive.max_steps < c.drive.steps_per_period)
        r.fail(root["max_steps"] ? root["max_steps"] : root, "max_steps", "must be >= steps_per_period");
    if (root["integrator"]) {
        try {
            c.drive.integrator = parse_integrator(r.text(root["integrator"], "integrator"));
        } catch (const ParameterError& e) {
            r.fail(root["integrator"], "integrator", e.what());
        }
    }
    if (root["tolerance"]) {
        c.drive.tolerance = r.real(root["tolerance"], "tolerance");
        if (!(c.drive.tolerance > 0.0)) r.fail(root["tolerance"], "tolerance", "must be positive");
    }
    if (root["couplings"]) c.couplings = r.couplings(root["couplings"], "couplings");
    if (root["cd_levels"])
        c.cd_levels = r.list<CdLevel>(root["cd_levels"], "cd_levels",
                                      [&](const YAML::Node& n, const std::string& f) { return r.level(n, f); });
    if (root["seed"]) c.seed = r.scalar<std::uint64_t>(root["seed"], "seed", "a nonnegative integer");

    positive("periods", c.periods);
    if (root["trace_couplings"])
        c.trace_couplings = r.couplings(root["trace_couplings"], "trace_couplings");
    positive("samples_per_period", c.samples_per_period);
    if (root["block_sizes"]) {
        c.block_sizes = r.list<int>(root["block_sizes"], "block_sizes",
                                    [&](const YAML::Node& n, const std::string& f) { return r.integer(n, f); });
        for (int m : c.block_sizes)
            if (m < 1 || m > c.drive.n_particles - 1)
                r.fail(root["block_sizes"], "block_sizes", "entries must lie in [1, n_particles - 1]");
    }
    positive("block_stride", c.block_stride);
    positive("transient", c.transient, 0);
    positive("grid_theta", c.grid_theta, 0);
    positive("grid_phi", c.grid_phi, 0);
    positive("map_theta", c.map_theta);
    positive("map_phi", c.map_phi);
    positive("window_start", c.window_start, 0);
    positive("window_end", c.window_end, 0);
    if (c.window_end < c.window_start)
        r.fail(root["window_end"] ? root["window_end"] : root, "window_end", "must be >= window_start");
    positive("cycles", c.cycles);
    positive("husimi_angles", c.husimi_angles, 0);
    if (root["oracle_cases"]) {
        c.oracle_cases = r.list<experiments::OracleCase>(
            root["oracle_cases"], "oracle_cases", [&](const YAML::Node& n, const std::string& f) {
                if (!n.IsMap()) r.fail(n, f, "expected {n_particles, cd_level}");
                for (const auto& kv : n) {
                    const std::string k = kv.first.as<std::string>();
                    if (k != "n_particles" && k != "cd_level") r.fail(kv.first, f, "unknown key '" + k + "'");
                }
                if (!n["n_particles"] || !n["cd_level"]) r.fail(n, f, "needs n_particles and cd_level");
                experiments::OracleCase oc;
                oc.n_particles = r.integer(n["n_particles"], f + ".n_particles");
                if (oc.n_particles < 1 || oc.n_particles > oracle::kMaxParticles)
                    r.fail(n["n_particles"], f + ".n_particles",
                           "must lie in [1, " + std::to_string(oracle::kMaxParticles) + "]");
                oc.level = r.level(n["cd_level"], f + ".cd_level");
                return oc;
            });
    }
    if (c.experiment == Experiment::OracleCheck && c.drive.steps_per_period % 2 != 0)
        r.fail(root["steps_per_period"], "steps_per_period", "must be even for oracle-check");
    if (c.experiment == Experiment::Squeeze && c.transient >= c.periods)
        r.fail(root["transient"] ? root["transient"] : root, "transient", "must be smaller than periods");

    c.echo = to_json(root);
    c.echo["experiment"] = name;
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment_hint) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string(), experiment_hint);
}

}  // namespace lmgcd::harness

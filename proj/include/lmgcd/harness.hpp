#pragma once

// Experiment configs, the run driver and its persistent outputs.
//
// A config is a YAML mapping. Every experiment accepts the drive keys
//   n_particles, tau, steps_per_period, integrator, tolerance, max_steps,
//   couplings, cd_levels, seed
// plus its own keys (see `allowed_keys`). Unknown keys are errors.
// `couplings` is either a list or {start, stop, count} (inclusive linspace).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lmgcd/experiments.hpp"

namespace lmgcd::harness {

enum class Experiment { Spectrum, Freeze, Entangle, Squeeze, Localize, ChaosMap, Anneal, OracleCheck };

std::string to_string(Experiment experiment);
Experiment parse_experiment(const std::string& text);
const std::vector<Experiment>& all_experiments();

/// Invalid config: message carries "<file>:<line>: <field>: <problem>".
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
    Experiment experiment = Experiment::Spectrum;
    experiments::DriveSettings drive;
    std::vector<double> couplings{3.125};
    std::vector<CdLevel> cd_levels{CdLevel::None, CdLevel::CD1, CdLevel::CD2};
    std::uint64_t seed = 20240917;

    int periods = 2000;                     // freeze, entangle, squeeze
    std::vector<double> trace_couplings;    // freeze: J values whose F(nT) series is written
    int samples_per_period = 16;            // entangle micromotion
    std::vector<int> block_sizes;           // entangle
    int block_stride = 10;                  // entangle
    int transient = 50;                     // entangle, squeeze
    int grid_theta = 0;                     // localize (0 selects the default grid)
    int grid_phi = 0;
    int map_theta = 64;                     // chaosmap
    int map_phi = 128;
    int window_start = 9500;
    int window_end = 10500;
    int cycles = 40;                        // anneal
    std::vector<experiments::OracleCase> oracle_cases{{6, CdLevel::CD2}, {8, CdLevel::CD1}, {8, CdLevel::None}};
    int husimi_angles = 10;                 // oracle-check

    std::string source;   // file the config came from
    nlohmann::json echo;  // parsed config, for the manifest
};

/// Keys accepted for an experiment (drive keys included).
std::set<std::string> allowed_keys(Experiment experiment);

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::string& experiment_hint = "");
ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment_hint = "");

struct RunOptions {
    std::filesystem::path out_dir = "results";
    int threads = 1;
    bool unresolved = false;      // headline <r> from the unresolved spectrum
    bool ipr_as_printed = false;  // IPR with the normalisation outside the inverse
};

struct RunReport {
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
    std::vector<std::string> failures;  // named criteria that did not hold
};

/// Runs the experiment, writes its CSVs and one manifest into out_dir.
RunReport run(const ExperimentConfig& config, const RunOptions& options);

/// Applies fn to 0 .. count-1 on `threads` workers; results come back in index
/// order. The first exception (lowest index) is rethrown after all workers stop.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int threads, const std::function<T(std::size_t)>& fn);

/// CSV with a '#' comment block of column definitions and units, then a
/// header row. Doubles are written with %.17g.
class CsvWriter {
public:
    struct Column {
        std::string name;
        std::string unit;
        std::string meaning;
    };
    using Cell = std::variant<long long, double, std::string>;

    CsvWriter(const std::filesystem::path& path, const std::string& title, std::vector<Column> columns);
    void row(const std::vector<Cell>& cells);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::size_t width_;
    std::ofstream out_;
};

std::string format_double(double value);

}  // namespace lmgcd::harness

#include "lmgcd/harness_parallel.hpp"

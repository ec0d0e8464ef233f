#include <iostream>

#include <CLI11.hpp>

#include "lmgcd/harness.hpp"

using namespace lmgcd;

int main(int argc, char** argv) {
    CLI::App app{"Counterdiabatic Floquet driving of the Lipkin-Meshkov-Glick model"};
    std::string experiment;
    std::string config_path;
    harness::RunOptions options;
    std::vector<std::string> names;
    for (auto e : harness::all_experiments()) names.push_back(harness::to_string(e));

    app.add_option("experiment", experiment, "Experiment to run")->required()->check(CLI::IsMember(names));
    app.add_option("--config,-c", config_path, "YAML config")->required()->check(CLI::ExistingFile);
    app.add_option("--out,-o", options.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads,-j", options.threads, "Worker threads over sweep points")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_flag("--unresolved", options.unresolved, "Headline <r> from the spectrum without parity resolution");
    app.add_flag("--ipr-as-printed", options.ipr_as_printed, "IPR with the prefactor outside the inverse");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = harness::load_config(config_path, experiment);
        const auto report = harness::run(config, options);
        for (const auto& f : report.files) std::cout << f.string() << '\n';
        std::cout << report.manifest.string() << '\n';
        if (!report.failures.empty()) {
            for (const auto& f : report.failures) std::cerr << "criterion failed: " << f << '\n';
            return 5;
        }
    } catch (const harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const UnsupportedOrderError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

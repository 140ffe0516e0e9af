#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "petzlab/petzlab.hpp"

int main(int argc, char** argv) {
    CLI::App app{"petzlab - continuous Petz recovery experiments"};
    app.set_version_flag("--version", PETZLAB_VERSION);

    std::string experiment;
    std::string config;
    std::string out_dir;
    std::int64_t seed = -1;
    int threads = 0;

    app.add_option("experiment", experiment, "one of: reverse-qubit, reverse-unitary, "
                                             "hardware-sweep, code-optimize, strobe, bloch-check")
        ->required();
    app.add_option("--config", config, "experiment config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--seed", seed, "RNG seed (overrides the config seed)");
    app.add_option("--threads", threads, "worker threads for sweeps "
                                         "(default: PETZLAB_THREADS or 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    if (threads <= 0) {
        if (const char* env = std::getenv("PETZLAB_THREADS")) threads = std::atoi(env);
        if (threads <= 0) threads = 1;
    }

    petzlab::ExperimentSpec spec;
    spec.name = experiment;
    spec.config_path = config;
    spec.out_dir = out_dir;
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
    spec.threads = threads;

    try {
        petzlab::run_experiment(spec);
    } catch (const petzlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const petzlab::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aklab/config.hpp"
#include "aklab/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"anticipating stochastic calculus laboratory"};
    app.set_version_flag("--version", AKLAB_VERSION);

    std::string config_path;
    aklab::RunOptions opts;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;
    bool check_only = false;

    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "config or manifest JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
    auto* out_opt = run->add_option("--out", out, "output directory");
    auto* thr_opt = run->add_option("--threads", threads, "worker threads");
    run->add_flag("--check", check_only, "schema-validate only, run nothing");

    CLI11_PARSE(app, argc, argv);
    if (!*run) {
        std::cerr << app.help() << std::endl;
        return 2;
    }

    nlohmann::json raw;
    try {
        std::ifstream is(config_path);
        raw = nlohmann::json::parse(is);
    } catch (const std::exception& e) {
        std::cerr << "error: cannot parse " << config_path << ": " << e.what()
                  << std::endl;
        return 2;
    }

    if (*seed_opt) opts.seed_override = seed;
    if (*out_opt) opts.out_override = out;
    if (*thr_opt) opts.threads_override = threads;
    opts.check_only = check_only;

    try {
        const int status = aklab::run_experiment(raw, opts);
        if (check_only) std::cout << "config ok" << std::endl;
        return status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
}

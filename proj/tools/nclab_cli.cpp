// Command-line front end; links only the C API of the shared library.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "nclab.h"

int main(int argc, char** argv) {
    CLI::App app{"nclab: exact correlation functions of non-colliding Brownian motions"};
    app.set_version_flag("--version", std::string(nclab_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    std::uint64_t seed = 0;
    bool has_seed = false;

    const char* env_threads = std::getenv("NCLAB_THREADS");
    if (env_threads) threads = std::atoi(env_threads);

    std::vector<CLI::App*> subs;
    for (const char* name : {"density", "correlate", "characteristic", "simulate", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_dir, "output directory (default: current)");
        sub->add_option("--threads", threads, "worker thread cap (env NCLAB_THREADS)");
        sub->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { has_seed = true; });
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help/--version; anything else is a usage error
        return code == 0 ? 0 : NCLAB_ERR_CONFIG;
    }

    const std::string mode = app.get_subcommands().front()->get_name();
    const int status = nclab_run(mode.c_str(), config_path.c_str(), out_dir.c_str(), threads,
                                 seed, has_seed ? 1 : 0);
    if (status != 0) {
        const char* msg = nclab_last_error();
        if (msg && msg[0]) std::fprintf(stderr, "nclab: %s\n", msg);
    }
    return status;
}

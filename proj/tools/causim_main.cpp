#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "causim/error.hpp"
#include "causim/exp/runner.hpp"

namespace {

int fail(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json err;
    err["error"] = kind;
    err["message"] = message;
    std::cerr << err.dump() << '\n';
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causim: seeded simulation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CAUSIM_VERSION));

    auto* list = app.add_subcommand("list", "list registered experiments");
    bool verbose = false;
    list->add_flag("-v,--verbose", verbose, "show parameters and defaults");

    auto* run = app.add_subcommand("run", "run one experiment and write its report files");
    std::string name, out_dir, config_path;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    run->add_option("experiment", name, "experiment name (see `list`)")->required();
    run->add_option("--seed", seed, "random seed")->capture_default_str();
    auto* n_opt = run->add_option("--n", n, "rows (experiment default when omitted)");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--config", config_path, "key = value parameter file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("UsageError", e.what());
    }

    try {
        if (list->parsed()) {
            for (const auto& e : causim::exp::registry()) {
                std::cout << e.name << "\t" << e.summary << "\n";
                if (verbose) {
                    causim::exp::ParamSet p;
                    e.declare(p);
                    std::cout << "    n = " << e.default_n << "\n";
                    for (const auto& entry : p.entries()) {
                        std::cout << "    " << entry.key << " = " << entry.value << "    # " << entry.help << "\n";
                    }
                }
            }
            return 0;
        }
        causim::exp::ExperimentConfig config;
        config.name = name;
        config.seed = seed;
        if (n_opt->count() > 0) config.n = n;
        if (!config_path.empty()) config.params = causim::exp::read_config_file(config_path);
        const auto files = causim::exp::run_experiment(config);
        causim::exp::write_files(files, out_dir);
        for (const auto& f : files.files) std::cout << out_dir << "/" << f.first << "\n";
        return 0;
    } catch (const causim::Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("InternalError", e.what());
    }
}

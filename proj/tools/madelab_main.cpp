#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "madelab/run.hpp"

namespace {

// Exit codes: 0 ok, 2 validation, 3 numerical failure, 4 I/O.
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

madelab::run::RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw madelab::IoError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw madelab::ValidationError(std::string("config parse error: ") + e.what());
    }
    return madelab::run::config_from_json(j);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"madelab: Madelung / de Broglie-Bohm semiclassical laboratory"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "execute a preset or a JSON-configured run");
    std::string config_path, preset_name, out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    auto* opt_config = run_cmd->add_option("--config", config_path, "path to a JSON run config");
    auto* opt_preset = run_cmd->add_option("--preset", preset_name, "name of a shipped preset");
    run_cmd->add_option("--out", out_dir, "output directory (overrides the config)");
    auto* opt_seed = run_cmd->add_option("--seed", seed, "RNG seed (overrides the config)");
    auto* opt_threads =
        run_cmd->add_option("--threads", threads, "worker threads; 1 forces serial mode");
    opt_config->excludes(opt_preset);

    auto* list_cmd = app.add_subcommand("list-presets", "list the shipped presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (list_cmd->parsed()) {
            for (const auto& p : madelab::run::list_presets())
                std::cout << p.name << " - " << p.description << "\n";
            return 0;
        }

        madelab::run::RunConfig cfg;
        if (opt_preset->count()) {
            cfg = madelab::run::preset(preset_name);
        } else if (opt_config->count()) {
            cfg = load_config(config_path);
        } else {
            std::cerr << "error(validation): run needs --preset or --config\n";
            return kExitValidation;
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (opt_seed->count()) cfg.seed = seed;
        if (opt_threads->count()) cfg.threads = threads;

        const auto result = madelab::run::execute(cfg);
        std::cout << "wrote " << result.files_written.size() << " files to " << cfg.out_dir
                  << "\n";
        for (const auto& f : result.files_written) std::cout << "  " << f << "\n";
        return 0;
    } catch (const madelab::ValidationError& e) {
        std::cerr << "error(validation): " << e.what() << "\n";
        return kExitValidation;
    } catch (const madelab::NumericalError& e) {
        std::cerr << "error(numerical): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const madelab::IoError& e) {
        std::cerr << "error(io): " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error(io): " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error(numerical): " << e.what() << "\n";
        return kExitNumerical;
    }
}

// cuefuse command-line entry point.
//
//   cuefuse aggregate|face|context|fuse|eval|all --config <path> [--offline]
//   cuefuse generate-fixture --out <dir> [--seed N]
//
// Exit codes: 0 success, 2 config error, 3 input data error, 4 network/LLM
// error, 5 internal invariant violation.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "cuefuse/error.hpp"
#include "cuefuse/fixtures.hpp"
#include "cuefuse/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitNetwork = 4;
constexpr int kExitInternal = 5;

int exit_code_for(const cuefuse::Error& e) {
    switch (cuefuse::error_category(e.kind())) {
        case cuefuse::ErrorCategory::Config: return kExitConfig;
        case cuefuse::ErrorCategory::InputData: return kExitInput;
        case cuefuse::ErrorCategory::Network: return kExitNetwork;
        case cuefuse::ErrorCategory::Internal: return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian cue integration of facial and situational emotion estimates"};
    app.require_subcommand(1);

    std::string config_path;
    bool offline = false;
    const std::vector<std::string> stages = {"aggregate", "face", "context", "fuse", "eval", "all"};
    for (const auto& name : stages) {
        auto* sub = app.add_subcommand(name, "run the " + name + " stage");
        sub->add_option("--config", config_path, "run config (JSON)")->required();
        sub->add_flag("--offline", offline, "serve LLM requests from the cache and replay fixture only");
    }

    std::string fixture_dir;
    std::uint64_t seed = 7;
    auto* gen = app.add_subcommand("generate-fixture", "write a seeded synthetic corpus and configs");
    gen->add_option("--out", fixture_dir, "output directory")->required();
    gen->add_option("--seed", seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            cuefuse::FixtureOptions options;
            options.seed = seed;
            const auto files = cuefuse::generate_fixture(fixture_dir, options);
            std::cout << "wrote " << files.config.string() << " and " << files.integration_config.string() << "\n";
            return 0;
        }

        auto cfg = cuefuse::load_run_config(config_path);
        if (offline) cfg.offline = true;
        const auto factory = cuefuse::default_client_factory(cfg);
        cuefuse::OutputLock lock(cfg.output_dir());

        const std::string stage = app.get_subcommands().front()->get_name();
        if (stage == "aggregate") {
            cuefuse::cmd_aggregate(cfg);
        } else if (stage == "face") {
            cuefuse::cmd_face(cfg);
        } else if (stage == "context") {
            cuefuse::cmd_context(cfg, factory);
        } else if (stage == "fuse") {
            cuefuse::cmd_fuse(cfg, factory);
        } else if (stage == "eval") {
            cuefuse::cmd_eval(cfg);
        } else {
            cuefuse::cmd_all(cfg, factory);
        }
        return 0;
    } catch (const cuefuse::Error& e) {
        std::cerr << "cuefuse: " << cuefuse::error_kind_name(e.kind()) << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "cuefuse: IoError: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "cuefuse: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

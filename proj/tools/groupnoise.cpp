#include "groupnoise/errors.hpp"
#include "groupnoise/experiment.hpp"
#include "groupnoise/report.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace groupnoise;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

int execute(ExperimentConfig cfg, const std::vector<std::string>& sets, const std::optional<std::uint64_t>& seed,
            const std::string& out, const std::string& format) {
    for (const auto& s : sets) apply_setting(cfg, s);
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.out = out;
    if (!format.empty()) cfg.format = format;
    validate(cfg);
    const auto rows = run_experiment(cfg);
    emit_report(rows, cfg.out, cfg.format);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"groupnoise: noise sensitivity of random walks on groups"};
    app.require_subcommand(1);

    std::string config_path, preset, out, format;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--set", sets, "Override a config key (key=value)")->take_all()->allow_extra_args(false);
        cmd->add_option("--seed", seed, "Master seed");
        cmd->add_option("--out", out, "Output path (default stdout)");
        cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* run = app.add_subcommand("run", "Run an experiment config");
    run->add_option("config", config_path, "Config file")->required();
    add_common(run);

    CLI::App* pre = app.add_subcommand("preset", "Run a named preset ('list' prints the names)");
    pre->add_option("name", preset, "Preset name")->required();
    add_common(pre);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return execute(load_config(config_path), sets, seed, out, format);
        if (preset == "list") {
            for (const auto& name : preset_names()) std::cout << name << '\n';
            return kExitOk;
        }
        return execute(preset_config(preset), sets, seed, out, format);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SpecMismatch& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

// qarrow: quench thermodynamics datasets.
//
//   qarrow identity|fig3|fig4a|fig4c|crooks|charfn [--config FILE] [overrides]
//
// Exit codes: 0 success, 2 configuration error, 3 tolerance failure, 4 I/O error.

#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qarrow/errors.hpp"
#include "qarrow/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTolerance = 3;
constexpr int kExitIo = 4;

using Runner = std::function<qarrow::RunResult(const qarrow::ExperimentConfig&)>;

}  // namespace

int main(int argc, char** argv) {
    const std::map<std::string, Runner> commands{
        {"identity", qarrow::run_identity_check}, {"fig3", qarrow::run_figure3},
        {"fig4a", qarrow::run_figure4a},          {"fig4c", qarrow::run_figure4c},
        {"crooks", qarrow::run_crooks},           {"charfn", qarrow::run_charfn},
    };

    CLI::App app{"Forward/backward quench simulator: entropy production, work statistics and "
                 "fluctuation-theorem datasets"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> tau_us;
    std::vector<std::string> settings;
    double noise_sigma = -1.0;
    std::string seed, out_dir, nu0, nu_tau;

    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--tau-us", tau_us, "quench durations in microseconds (repeatable, or comma list)")
        ->delimiter(',');
    app.add_option("--noise-sigma", noise_sigma, "std. dev. of Gaussian noise on chi(u) samples");
    app.add_option("--seed", seed, "noise seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--nu0", nu0, "initial field, kHz");
    app.add_option("--nu-tau", nu_tau, "final field, kHz");
    app.add_option("--set", settings, "extra key=value override (repeatable)");

    for (const auto& [name, runner] : commands) app.add_subcommand(name, "emit the " + name + " dataset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        qarrow::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = qarrow::load_config(config_path);
        if (!tau_us.empty()) {
            std::string joined;
            for (const auto& t : tau_us) joined += (joined.empty() ? "" : ",") + t;
            qarrow::apply_setting(cfg, "tau_list_us", joined);
        }
        if (noise_sigma >= 0.0) cfg.noise_sigma = noise_sigma;
        if (!seed.empty()) qarrow::apply_setting(cfg, "seed", seed);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!nu0.empty()) qarrow::apply_setting(cfg, "nu0_khz", nu0);
        if (!nu_tau.empty()) qarrow::apply_setting(cfg, "nu_tau_khz", nu_tau);
        for (const auto& kv : settings) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw qarrow::ConfigError("--set expects key=value, got '" + kv + "'");
            qarrow::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        qarrow::validate(cfg);

        const auto* sub = app.get_subcommands().front();
        const auto result = commands.at(sub->get_name())(cfg);
        for (const auto& path : qarrow::write_datasets(cfg, result)) std::cout << path.string() << '\n';
        for (const auto& note : result.notes) std::cerr << note << '\n';
        if (!result.tolerance_ok) {
            std::cerr << "tolerance check failed\n";
            return kExitTolerance;
        }
        return 0;
    } catch (const qarrow::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qarrow::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const qarrow::ToleranceError& e) {
        std::cerr << "tolerance error: " << e.what() << '\n';
        return kExitTolerance;
    } catch (const qarrow::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

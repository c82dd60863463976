#pragma once

// Experiment orchestration: configuration, tau sweeps and the CSV datasets
// behind the trajectory, entropy-production, sweep and Crooks-fit figures.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qarrow/csv.hpp"
#include "qarrow/interferometer.hpp"
#include "qarrow/quench.hpp"

namespace qarrow {

enum class CrooksSource { interferometer, tpm };

struct ExperimentConfig {
    double beta_h_inv_khz = kReferenceThermalEnergyKHz;  ///< k_B T / h; beta h = 1 / this
    double nu0_khz = 1.0;
    double nu_tau_khz = 1.8;
    double phase_sweep_rad = QuenchProtocol::kDefaultPhaseSweep;
    std::vector<double> tau_list_us{100, 200, 260, 320, 420, 500, 700};
    int n_steps = 2000;
    int n_time_samples = 21;
    int n_char_samples = 360;
    double u_span_ms = 2.5;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    CrooksSource crooks_source = CrooksSource::interferometer;
    std::filesystem::path output_dir = ".";

    [[nodiscard]] InverseTemperature beta() const;
    [[nodiscard]] QuenchProtocol protocol(double tau_us, Direction d = Direction::forward) const;
    [[nodiscard]] PropagationSettings propagation() const;
    /// Interferometer settings with a noise seed derived from (seed, tau index, direction).
    [[nodiscard]] InterferometerSettings interferometer(std::size_t tau_index, Direction d) const;
};

/// Sets one `key = value` entry. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
/// Throws IoError if unreadable, ConfigError if malformed.
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path,
                                           ExperimentConfig base = {});

/// Throws ConfigError unless every physical parameter is positive and the
/// tau list is non-empty.
void validate(const ExperimentConfig& cfg);

/// Tolerance on the identity check above which the run fails.
inline constexpr double kIdentityFailureTolerance = 1e-6;

struct Dataset {
    std::string filename;
    CsvTable table;
};

struct RunResult {
    std::vector<Dataset> datasets;
    bool tolerance_ok = true;
    std::vector<std::string> notes;  ///< advisory messages for stderr
};

[[nodiscard]] RunResult run_identity_check(const ExperimentConfig& cfg);
[[nodiscard]] RunResult run_figure3(const ExperimentConfig& cfg);
[[nodiscard]] RunResult run_figure4a(const ExperimentConfig& cfg);
[[nodiscard]] RunResult run_figure4c(const ExperimentConfig& cfg);
[[nodiscard]] RunResult run_crooks(const ExperimentConfig& cfg);
[[nodiscard]] RunResult run_charfn(const ExperimentConfig& cfg);

/// Writes every dataset under cfg.output_dir once all are complete. Returns
/// the paths written.
std::vector<std::filesystem::path> write_datasets(const ExperimentConfig& cfg,
                                                  const RunResult& result);

}  // namespace qarrow

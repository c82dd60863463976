#include "qarrow/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "qarrow/crooksfit.hpp"
#include "qarrow/errors.hpp"
#include "qarrow/workstats.hpp"

namespace qarrow {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError("invalid number for " + std::string(key) + ": '" + std::string(text) + "'");
    return v;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view text) {
    text = trim(text);
    Int v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ConfigError("invalid integer for " + std::string(key) + ": '" + std::string(text) + "'");
    return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty()) out.push_back(parse_double(key, item));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

/// Runs f(0..n-1) on independent threads and returns results in index order.
template <class F>
auto parallel_map(std::size_t n, F f) {
    using R = decltype(f(std::size_t{0}));
    std::vector<std::future<R>> futures;
    futures.reserve(n);
    for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, f, i));
    std::vector<R> out;
    out.reserve(n);
    for (auto& fut : futures) out.push_back(fut.get());
    return out;
}

std::string num(double v) { return format_number(v); }

/// Time of sample k on a uniform n-point grid over [0, tau], in microseconds.
double grid_time_us(double tau_us, std::size_t k, std::size_t n) {
    return tau_us * (static_cast<double>(k) / static_cast<double>(n - 1));
}

double protocol_delta_f(const ExperimentConfig& cfg, Direction d) {
    const double df = free_energy_difference(cfg.beta(), cfg.nu0_khz, cfg.nu_tau_khz);
    return d == Direction::forward ? df : -df;
}

WorkDistribution interferometric_distribution(const ExperimentConfig& cfg, std::size_t tau_index,
                                              Direction d) {
    const auto p = cfg.protocol(cfg.tau_list_us[tau_index], d);
    const auto series = simulate_ramsey(p, cfg.beta(), cfg.interferometer(tau_index, d),
                                        cfg.propagation());
    auto wd = to_work_distribution(fit_peaks(series, expected_peak_locations(p)), p);
    if (cfg.noise_sigma == 0.0)
        for (auto& pk : wd.peaks) pk.uncertainty.reset();
    return wd;
}

}  // namespace

// ---------------------------------------------------------------------------

InverseTemperature ExperimentConfig::beta() const {
    return InverseTemperature::from_thermal_energy_khz(beta_h_inv_khz);
}

QuenchProtocol ExperimentConfig::protocol(double tau_us, Direction d) const {
    return QuenchProtocol(nu0_khz, nu_tau_khz, tau_us * 1e-6, d, phase_sweep_rad);
}

PropagationSettings ExperimentConfig::propagation() const {
    PropagationSettings s;
    s.n_steps = n_steps;
    return s;
}

InterferometerSettings ExperimentConfig::interferometer(std::size_t tau_index, Direction d) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tau_index),
                      static_cast<std::uint32_t>(d == Direction::forward ? 0 : 1)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());

    InterferometerSettings s;
    s.n_samples = n_char_samples;
    s.u_span_s = u_span_ms * 1e-3;
    s.noise_sigma = noise_sigma;
    s.seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    return s;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "beta_h_inv_khz") cfg.beta_h_inv_khz = parse_double(key, value);
    else if (key == "nu0_khz") cfg.nu0_khz = parse_double(key, value);
    else if (key == "nu_tau_khz") cfg.nu_tau_khz = parse_double(key, value);
    else if (key == "phase_sweep_rad") cfg.phase_sweep_rad = parse_double(key, value);
    else if (key == "tau_list_us") cfg.tau_list_us = parse_list(key, value);
    else if (key == "n_steps") cfg.n_steps = parse_integer<int>(key, value);
    else if (key == "n_time_samples") cfg.n_time_samples = parse_integer<int>(key, value);
    else if (key == "n_char_samples") cfg.n_char_samples = parse_integer<int>(key, value);
    else if (key == "u_span_ms") cfg.u_span_ms = parse_double(key, value);
    else if (key == "noise_sigma") cfg.noise_sigma = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "output_dir") cfg.output_dir = std::string(value);
    else if (key == "crooks_source") {
        if (value == "interferometer") cfg.crooks_source = CrooksSource::interferometer;
        else if (value == "tpm") cfg.crooks_source = CrooksSource::tpm;
        else throw ConfigError("crooks_source must be 'interferometer' or 'tpm'");
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration file " + path.string());
    return parse_config(in, std::move(base));
}

void validate(const ExperimentConfig& cfg) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string(name) + " must be positive and finite");
    };
    positive(cfg.beta_h_inv_khz, "beta_h_inv_khz");
    positive(cfg.nu0_khz, "nu0_khz");
    positive(cfg.nu_tau_khz, "nu_tau_khz");
    positive(cfg.u_span_ms, "u_span_ms");
    if (!std::isfinite(cfg.phase_sweep_rad)) throw ConfigError("phase_sweep_rad must be finite");
    if (cfg.tau_list_us.empty()) throw ConfigError("tau_list_us must not be empty");
    for (double tau : cfg.tau_list_us) positive(tau, "every tau_list_us entry");
    if (cfg.n_steps < 1) throw ConfigError("n_steps must be >= 1");
    if (cfg.n_time_samples < 2) throw ConfigError("n_time_samples must be >= 2");
    if (cfg.n_char_samples < 16) throw ConfigError("n_char_samples must be >= 16");
    if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma))
        throw ConfigError("noise_sigma must be finite and non-negative");
}

// ---------------------------------------------------------------------------

RunResult run_identity_check(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto beta = cfg.beta();
    const auto reports = parallel_map(cfg.tau_list_us.size(), [&](std::size_t i) {
        const auto p = cfg.protocol(cfg.tau_list_us[i]);
        return sigma_equals_kl_check(p, beta, cfg.propagation(),
                                     uniform_time_grid(p.tau_s(), cfg.n_time_samples));
    });

    RunResult result;
    CsvTable table({"tau_us", "t_us", "mean_sigma", "kl_forward_backward", "kl_final_vs_eq",
                    "max_deviation"});
    double worst = 0.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        worst = std::max(worst, r.max_deviation);
        for (std::size_t k = 0; k < r.times.size(); ++k)
            table.add_row({num(cfg.tau_list_us[i]), num(grid_time_us(cfg.tau_list_us[i], k, r.times.size())),
                           num(r.sigma_from_work),
                           num(r.kl_forward_backward[k]), num(r.kl_final_vs_equilibrium),
                           num(r.max_deviation)});
    }
    result.tolerance_ok = worst <= kIdentityFailureTolerance;
    result.notes.push_back("largest identity deviation: " + num(worst));
    result.datasets.push_back({"identity.csv", std::move(table)});
    return result;
}

RunResult run_figure3(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto beta = cfg.beta();
    struct Rows {
        BlochTrajectory forward, backward, quasistatic;
    };
    const auto runs = parallel_map(cfg.tau_list_us.size(), [&](std::size_t i) {
        const auto p = cfg.protocol(cfg.tau_list_us[i]);
        const auto s = cfg.propagation();
        return Rows{trajectory(p, beta, cfg.n_time_samples, s),
                    trajectory(p.with_direction(Direction::backward), beta, cfg.n_time_samples, s),
                    quasistatic_trajectory(p, beta, cfg.n_time_samples)};
    });

    CsvTable table({"tau_us", "kind", "t_us", "x", "y", "z"});
    for (std::size_t i = 0; i < runs.size(); ++i) {
        auto emit = [&](const char* kind, const BlochTrajectory& tr) {
            for (std::size_t k = 0; k < tr.times.size(); ++k)
                table.add_row({num(cfg.tau_list_us[i]), kind,
                               num(grid_time_us(cfg.tau_list_us[i], k, tr.times.size())),
                               num(tr.vectors[k][0]), num(tr.vectors[k][1]), num(tr.vectors[k][2])});
        };
        emit("forward", runs[i].forward);
        emit("backward", runs[i].backward);
        emit("quasistatic", runs[i].quasistatic);
    }
    RunResult result;
    result.datasets.push_back({"fig3_trajectories.csv", std::move(table)});
    return result;
}

RunResult run_figure4a(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto beta = cfg.beta();
    const auto dists = parallel_map(cfg.tau_list_us.size(), [&](std::size_t i) {
        std::array<EntropyProductionDistribution, 2> out{
            entropy_distribution(
                tpm_work_distribution(cfg.protocol(cfg.tau_list_us[i]), beta, cfg.propagation()),
                beta, protocol_delta_f(cfg, Direction::forward)),
            entropy_distribution(
                tpm_work_distribution(cfg.protocol(cfg.tau_list_us[i], Direction::backward), beta,
                                      cfg.propagation()),
                beta, protocol_delta_f(cfg, Direction::backward))};
        return out;
    });

    CsvTable table({"tau_us", "direction", "W_hkHz", "sigma", "probability"});
    for (std::size_t i = 0; i < dists.size(); ++i) {
        for (int d = 0; d < 2; ++d) {
            const auto& ed = dists[i][static_cast<std::size_t>(d)];
            for (const auto& pt : ed.points) {
                const double w = pt.sigma / beta.value() + ed.delta_f_hkhz;
                table.add_row({num(cfg.tau_list_us[i]), d == 0 ? "forward" : "backward", num(w),
                               num(pt.sigma), num(pt.probability)});
            }
        }
    }
    RunResult result;
    result.datasets.push_back({"fig4a_entropy_distribution.csv", std::move(table)});
    return result;
}

RunResult run_figure4c(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto beta = cfg.beta();
    const double df = protocol_delta_f(cfg, Direction::forward);
    struct Row {
        double sigma, sigma_lr;
    };
    const auto rows = parallel_map(cfg.tau_list_us.size(), [&](std::size_t i) {
        const auto wd = tpm_work_distribution(cfg.protocol(cfg.tau_list_us[i]), beta,
                                              cfg.propagation());
        return Row{mean_sigma(entropy_distribution(wd, beta, df)), linear_response_sigma(wd, beta)};
    });

    RunResult result;
    CsvTable table({"tau_us", "mean_sigma", "mean_sigma_lr"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        table.add_row({num(cfg.tau_list_us[i]), num(rows[i].sigma), num(rows[i].sigma_lr)});
        if (i > 0 && cfg.tau_list_us[i] > cfg.tau_list_us[i - 1] && rows[i].sigma > rows[i - 1].sigma)
            result.notes.push_back("advisory: <Sigma> rises from " + num(rows[i - 1].sigma) +
                                   " at tau = " + num(cfg.tau_list_us[i - 1]) + " us to " +
                                   num(rows[i].sigma) + " at tau = " + num(cfg.tau_list_us[i]) +
                                   " us");
    }
    result.datasets.push_back({"fig4c_sweep.csv", std::move(table)});
    return result;
}

RunResult run_crooks(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto beta = cfg.beta();
    const auto groups = parallel_map(cfg.tau_list_us.size(), [&](std::size_t i) {
        if (cfg.crooks_source == CrooksSource::tpm) {
            const auto s = cfg.propagation();
            return log_ratio_points(
                tpm_work_distribution(cfg.protocol(cfg.tau_list_us[i]), beta, s),
                tpm_work_distribution(cfg.protocol(cfg.tau_list_us[i], Direction::backward), beta, s));
        }
        return log_ratio_points(interferometric_distribution(cfg, i, Direction::forward),
                                interferometric_distribution(cfg, i, Direction::backward));
    });

    const auto per_tau = fit_line(std::span<const std::vector<LogRatioPoint>>(groups), FitMode::per_tau);
    const auto pooled = fit_line(std::span<const std::vector<LogRatioPoint>>(groups), FitMode::pooled).front();

    CsvTable table({"tau_us", "W_hkHz", "log_ratio", "fit_slope", "fit_intercept", "stderr_slope",
                    "stderr_intercept"});
    CsvTable summary({"tau_us", "beta_est", "beta_delta_f_est", "delta_f_est", "stderr_slope",
                      "stderr_intercept"});
    auto emit = [&](const std::string& tau, const CrooksFitResult& fit) {
        for (const auto& pt : fit.points_used)
            table.add_row({tau, num(pt.work_hkhz), num(pt.log_ratio), num(fit.slope()),
                           num(fit.intercept()), num(fit.stderr_slope), num(fit.stderr_intercept)});
        summary.add_row({tau, num(fit.beta_est), num(fit.beta_delta_f_est), num(fit.delta_f_est),
                         num(fit.stderr_slope), num(fit.stderr_intercept)});
    };
    for (std::size_t i = 0; i < per_tau.size(); ++i) emit(num(cfg.tau_list_us[i]), per_tau[i]);
    emit("pooled", pooled);

    RunResult result;
    result.notes.push_back("pooled fit: beta*h = " + num(pooled.beta_est) + " /kHz (reference " +
                           num(beta.value()) + "), dF = " + num(pooled.delta_f_est) +
                           " h*kHz (reference " + num(protocol_delta_f(cfg, Direction::forward)) + ")");
    result.datasets.push_back({"crooks_fit.csv", std::move(table)});
    result.datasets.push_back({"crooks_summary.csv", std::move(summary)});
    return result;
}

RunResult run_charfn(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto beta = cfg.beta();
    struct Output {
        CharFuncSeries series;
        Spectrum spectrum;
        PeakFitResult fit;
        WorkDistribution tpm;
    };
    std::vector<std::pair<std::size_t, Direction>> jobs;
    for (std::size_t i = 0; i < cfg.tau_list_us.size(); ++i)
        for (Direction d : {Direction::forward, Direction::backward}) jobs.emplace_back(i, d);

    const auto outputs = parallel_map(jobs.size(), [&](std::size_t j) {
        const auto [i, d] = jobs[j];
        const auto p = cfg.protocol(cfg.tau_list_us[i], d);
        auto series = simulate_ramsey(p, beta, cfg.interferometer(i, d), cfg.propagation());
        auto spectrum = inverse_dft(series);
        auto fit = fit_peaks(series, expected_peak_locations(p));
        return Output{std::move(series), std::move(spectrum), fit,
                      tpm_work_distribution(p, beta, cfg.propagation())};
    });

    RunResult result;
    CsvTable peaks({"tau_us", "direction", "W_hkHz", "tpm_probability", "dft_amplitude",
                    "fit_amplitude", "fit_stderr"});
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const auto [i, d] = jobs[j];
        const auto& o = outputs[j];
        const std::string tag = std::string(to_string(d)) + "_tau" + num(cfg.tau_list_us[i]);

        CsvTable chi({"s", "u_seconds", "re_chi", "im_chi"});
        for (std::size_t k = 0; k < o.series.samples.size(); ++k)
            chi.add_row({num(o.series.s_parameter[k]), num(o.series.u_grid[k]),
                         num(o.series.samples[k].real()), num(o.series.samples[k].imag())});
        CsvTable bins({"bin_hkHz", "amplitude"});
        for (const auto& b : o.spectrum.bins)
            bins.add_row({num(b.work_hkhz), num(b.amplitude.real())});

        for (std::size_t k = 0; k < 4; ++k)
            peaks.add_row({num(cfg.tau_list_us[i]), to_string(d), num(o.fit.locations[k]),
                           num(o.tpm.peaks[k].probability), num(o.spectrum.peaks[k].amplitude),
                           num(o.fit.amplitudes[k]), num(o.fit.standard_errors[k])});

        result.datasets.push_back({"charfn_" + tag + ".csv", std::move(chi)});
        result.datasets.push_back({"spectrum_" + tag + ".csv", std::move(bins)});
    }
    result.datasets.push_back({"charfn_peaks.csv", std::move(peaks)});
    return result;
}

std::vector<std::filesystem::path> write_datasets(const ExperimentConfig& cfg,
                                                  const RunResult& result) {
    std::vector<std::filesystem::path> written;
    written.reserve(result.datasets.size());
    for (const auto& ds : result.datasets) {
        const auto path = cfg.output_dir / ds.filename;
        write_file_atomically(path, ds.table.render());
        written.push_back(path);
    }
    return written;
}

}  // namespace qarrow

#pragma once

// Run configuration in laboratory units (MHz, kHz, us, sqrt(Hz)) and its
// conversion to internal units. The JSON layout has sections device, probe,
// schedule, engine, sweep and output; every key carries its unit suffix.

#include "critsense/fokker_planck.hpp"
#include "critsense/langevin.hpp"
#include "critsense/model.hpp"
#include "critsense/sweep.hpp"

#include <json.hpp>

#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace critsense {

/// Configuration problem; path() names the offending key, e.g. "device.kappa_mhz".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct DeviceConfig {
    std::optional<double> kappa_mhz;
    std::optional<double> gamma_mhz;
    std::optional<double> kerr_khz;
    std::optional<double> kerr_over_kg;
    std::optional<double> delta_mhz;
    std::optional<double> delta_over_kg;
    std::optional<double> alpha_over_kg;
    std::optional<double> alpha_mhz;
    double theta_rad = std::numbers::pi / 2.0;
    double theta_p_rad = 0.0;
    double n_thermal = 0.0;
};

struct ProbeConfig {
    double b_sqrt_hz = 1e3;
    double phi_rad = std::numbers::pi / 4.0;
    double t_on_us = 0.23;
    double t_off_us = 1.23;
};

struct ScheduleConfig {
    double pump_on_us = 0.0;
    double t_end_us = 4.0;
};

struct EngineConfig {
    double dt_ns = 1.0;
    std::size_t record_stride = 10;
    std::string model = "full";  ///< "full" or "reduced"
    std::size_t n_runs = 250;
    double q_threshold = 7.0;
    std::uint64_t base_seed = 20240;
    unsigned workers = 0;
    std::size_t fp_points = 4096;
    double fp_dt_ns = 2.0;
    double output_step_us = 0.01;
};

struct SweepConfig {
    double alpha_lo = 0.46;
    double alpha_hi = 0.54;
    std::size_t alpha_points = 9;
    double delta_lo_mhz = 0.6;
    double delta_hi_mhz = 0.8;
    std::size_t delta_points = 5;
    double phi_lo_rad = 0.0;
    double phi_hi_rad = 2.0 * std::numbers::pi;
    std::size_t phi_points = 0;  ///< 0: no phase axis
    std::string engine = "hl";
    std::size_t runs_per_cell = 100;
    double measure_at_us = 1.23;
};

struct OutputConfig {
    std::string out_dir = "out";
    bool plot_script = false;
};

struct RunConfig {
    DeviceConfig device;
    ProbeConfig probe;
    ScheduleConfig schedule;
    EngineConfig engine;
    SweepConfig sweep;
    OutputConfig output;
};

/// Parses a JSON document. Unknown sections or keys, wrong types and
/// conflicting unit alternatives raise ConfigError.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON file, applies "section.key=value" overrides, then parses.
/// Override values are read as JSON where possible, otherwise as strings.
[[nodiscard]] RunConfig load_config(const std::optional<std::string>& path,
                                    const std::vector<std::string>& overrides);

/// Applies one "section.key=value" override to a document.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Resolved configuration echo; parse_config(to_json(c)) reproduces c.
[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

/// Internal-unit views. Each validates and throws ConfigError on violations.
[[nodiscard]] DeviceParams device_params(const RunConfig& config);
[[nodiscard]] PulseSchedule pulse_schedule(const RunConfig& config);
[[nodiscard]] LangevinOptions langevin_options(const RunConfig& config);
[[nodiscard]] FokkerPlanckRun fokker_planck_run(const RunConfig& config,
                                                const DeviceParams& params);
[[nodiscard]] SweepSpec sweep_spec(const RunConfig& config);

}  // namespace critsense

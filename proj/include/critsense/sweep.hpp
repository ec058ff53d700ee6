#pragma once

// Parameter scans over (|alpha|, Delta) and over the probe phase.

#include "critsense/fokker_planck.hpp"
#include "critsense/langevin.hpp"
#include "critsense/metrics.hpp"
#include "critsense/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace critsense {

/// Inclusive range lo..hi with `points` evenly spaced values (points = 1 gives lo).
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 1;

    [[nodiscard]] std::vector<double> values() const;
    void validate(std::string_view name) const;
};

enum class SweepEngine { HeisenbergLangevin, FokkerPlanck, AnalyticOU };

[[nodiscard]] std::string_view to_string(SweepEngine engine);
/// Accepts "hl", "fp", "ou" and the long names; throws std::invalid_argument otherwise.
[[nodiscard]] SweepEngine parse_engine(std::string_view name);

struct SweepSpec {
    Range alpha_over_kg{0.46, 0.54, 9};
    Range delta_mhz{0.6, 0.8, 5};
    std::optional<Range> phi;
    SweepEngine engine = SweepEngine::HeisenbergLangevin;
    std::size_t runs_per_cell = 100;
    double measure_at = 1.23e-6;
    double q_threshold = 7.0;
    std::uint64_t base_seed = 0;
    LangevinOptions langevin;
    FokkerPlanckOptions fokker_planck;
    std::size_t fp_points = 4096;
    unsigned workers = 0;  ///< cells processed concurrently; 0 = hardware

    void validate() const;
};

struct SweepRow {
    std::size_t i_alpha = 0;
    std::size_t i_delta = 0;
    std::size_t i_phi = 0;
    double alpha_over_kg = 0.0;
    double delta_over_kg = 0.0;
    double phi = 0.0;
    SwitchingStats stats;
    bool masked = false;  ///< saturated, eta not reported
    bool failed = false;
    std::string error;
};

struct CriticalLinePoint {
    double delta_over_kg = 0.0;
    double alpha_over_kg = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  ///< ordered by (i_alpha, i_delta, i_phi)
    std::vector<CriticalLinePoint> critical_line;
    std::size_t n_failed = 0;
};

/// Seed of run `run` in cell (i_alpha, i_delta, i_phi). Dark and probe runs
/// of a cell share seeds.
[[nodiscard]] std::uint64_t cell_seed(std::uint64_t base, std::size_t i_alpha,
                                      std::size_t i_delta, std::size_t i_phi, std::size_t run);

[[nodiscard]] std::vector<std::uint64_t> cell_seeds(const SweepSpec& spec, std::size_t i_alpha,
                                                    std::size_t i_delta, std::size_t i_phi);

/// One row per grid cell with p_dark, P_1+, p_1+ and eta at spec.measure_at.
/// base supplies kappa, gamma, K and the phases; pump and detuning come from
/// the grid. A cell that throws is recorded as failed and the sweep continues.
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec, const DeviceParams& base,
                                    const PulseSchedule& schedule);

struct PhaseSweepResult {
    std::vector<SweepRow> rows;  ///< one per phase, i_phi = position
    SwitchingStats dark;         ///< dark run with its own seed index
    std::size_t dark_switched = 0;
    std::vector<std::size_t> switched;  ///< probe counts per phase (stochastic engine)
};

/// P_1+ and p_1+ against the probe phase at fixed device parameters. The dark
/// run uses seed index i_phi = phis.size().
[[nodiscard]] PhaseSweepResult phase_sweep(const std::vector<double>& phis, const SweepSpec& spec,
                                           const DeviceParams& params,
                                           const PulseSchedule& schedule);

}  // namespace critsense

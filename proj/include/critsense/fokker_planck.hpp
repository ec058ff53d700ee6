#pragma once

// One-dimensional Fokker-Planck evolution of the slow-quadrature density,
//
//   dW/dt = d/dQ ( W dU_b/dQ ) + D d^2W/dQ^2,
//
// on a uniform node grid over [-Q_cap, Q_cap] with no-flux walls. Space is a
// finite-volume discretisation with exponentially fitted (Scharfetter-Gummel /
// Chang-Cooper) fluxes; time is Crank-Nicolson after a few backward-Euler
// start-up steps. The discrete mass sum_i w_i W_i with trapezoid weights is
// conserved to round-off.

#include "critsense/langevin.hpp"
#include "critsense/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace critsense {

struct GridSpec {
    double q_cap = 60.0;
    std::size_t n_points = 4096;

    [[nodiscard]] double spacing() const {
        return 2.0 * q_cap / static_cast<double>(n_points - 1);
    }
    void validate() const;
};

/// Q_cap = max(1.5 |Q_min|, 10 sqrt(D / max(s, 1e-3 (kappa+gamma)))).
[[nodiscard]] GridSpec default_grid(const DeviceParams& params, std::size_t n_points = 4096);

struct DensityGrid {
    std::vector<double> q_values;
    std::vector<double> weights;
    double time = 0.0;
    /// Steps taken since init_density; the backward-Euler start-up only
    /// applies to the first few, however many evolve calls they span.
    std::size_t steps_taken = 0;

    [[nodiscard]] double spacing() const { return q_values[1] - q_values[0]; }
};

enum class InitialKind { Thermal, DeltaAt, Gaussian };

struct InitialDensity {
    InitialKind kind = InitialKind::Thermal;
    double center = 0.0;  ///< delta_at / gaussian mean
    double sigma = 1.0;   ///< gaussian width

    static InitialDensity thermal() { return {}; }
    static InitialDensity delta_at(double q0) { return {InitialKind::DeltaAt, q0, 0.0}; }
    static InitialDensity gaussian(double mu, double sigma) {
        return {InitialKind::Gaussian, mu, sigma};
    }
};

/// Normalised initial density. Thermal is the Gaussian of variance n_T + 1/2;
/// delta_at is a Gaussian two grid cells wide.
[[nodiscard]] DensityGrid init_density(const InitialDensity& init, const GridSpec& grid,
                                       double n_thermal = 0.0);

/// Trapezoid integral of the density.
[[nodiscard]] double total_mass(const DensityGrid& w);
[[nodiscard]] double density_mean(const DensityGrid& w);
[[nodiscard]] double density_variance(const DensityGrid& w);

struct FokkerPlanckOptions {
    double dt = 2e-9;
    std::size_t startup_steps = 4;
    double max_mass_drift = 1e-4;

    void validate() const;
};

/// Diagnostics accumulated across evolve calls on one density.
struct EvolveStats {
    std::size_t steps = 0;
    std::size_t clipped_steps = 0;  ///< steps where negative weights were clipped
    double max_mass_error = 0.0;
};

/// Advances w to t_target. The pump is off before schedule.pump_on_at and the
/// probe tilt is applied on [t_on, t_off); time is split at those edges so
/// every edge falls on a step boundary. Throws NumericalError when the mass
/// drifts by more than options.max_mass_drift.
DensityGrid evolve(DensityGrid w, const DeviceParams& params, const PulseSchedule& schedule,
                   double t_target, const FokkerPlanckOptions& options = {},
                   EvolveStats* stats = nullptr);

/// 1 - integral of W over [-q_threshold, q_threshold], with linear
/// interpolation inside the cells that contain the threshold.
[[nodiscard]] double probability_outside(const DensityGrid& w, double q_threshold);

struct ProbabilitySeries {
    std::vector<double> times;
    std::vector<double> probability;
    std::vector<double> mass;
    EvolveStats stats;
};

struct FokkerPlanckRun {
    GridSpec grid;
    FokkerPlanckOptions options;
    InitialDensity initial = InitialDensity::thermal();
};

/// Thermal start at t = 0, evolved through the schedule, sampled at
/// output_times (ascending). Probe amplitude 0 gives p_dark, otherwise P_1+.
[[nodiscard]] ProbabilitySeries run_fp(const PulseSchedule& schedule, const DeviceParams& params,
                                       double q_threshold, std::span<const double> output_times,
                                       const FokkerPlanckRun& run);

/// Convenience: default grid for params, default options.
[[nodiscard]] ProbabilitySeries run_fp(const PulseSchedule& schedule, const DeviceParams& params,
                                       double q_threshold, std::span<const double> output_times);

/// Evenly spaced times lo, lo+step, ..., hi, with hi included.
[[nodiscard]] std::vector<double> time_grid(double lo, double hi, double step);

}  // namespace critsense

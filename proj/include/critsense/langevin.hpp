#pragma once

// Stochastic integration of the semiclassical Heisenberg-Langevin equations.
//
// Full model (two quadratures, Ito, additive noise):
//   dQ = [ (|a| sin - k/2) Q + (D - |a| cos) P + 6K (P Q^2 + P^3) - F_Q ] dt - sqrt(k) dW_Q
//   dP = [-(|a| sin + k/2) P - (D + |a| cos) Q - 6K (Q P^2 + Q^3) - F_P ] dt - sqrt(k) dW_P
// with k = kappa + gamma, sin/cos of (theta - theta_P), F_Q/F_P the probe terms
// sqrt(2 kappa)|b| cos/sin(theta/2 - phi) and <dW^2> = (n_T + 1/2) dt.
//
// Reduced model: dQ = -U_b'(Q) dt - sqrt(k) dW_Q.
//
// Both are integrated with Euler-Maruyama on a fixed grid t_k = k dt. Pulse
// edges and pump switch-on are rounded to the nearest step index.

#include "critsense/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace critsense {

struct PulseSchedule {
    double pump_on_at = 0.0;
    ProbePulse probe;
    double t_end = 4e-6;

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> q;
    std::vector<double> p;  ///< empty for reduced-model runs
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const { return times.size(); }
};

struct QuadratureState {
    double q = 0.0;
    double p = 0.0;
};

struct QuadratureDrift {
    double dq_dt = 0.0;
    double dp_dt = 0.0;
};

enum class LangevinModel { Full, Reduced };

struct LangevinOptions {
    double dt = 1e-9;
    std::size_t record_stride = 10;
    LangevinModel model = LangevinModel::Full;
    /// Diagnostic switch: false integrates pure noise (drift forced to zero).
    bool drift_enabled = true;
    /// Worker threads for ensembles; 0 picks the hardware concurrency.
    unsigned workers = 0;

    void validate(const DeviceParams& params) const;
};

/// Deterministic part of the full equations of motion.
[[nodiscard]] QuadratureDrift drift_full(double q, double p, const DeviceParams& params,
                                         double probe_amp, double probe_phase);

/// One Euler-Maruyama step of the full model. z_q and z_p are standard normal
/// draws; the increment is -sqrt((kappa+gamma)(n_T+1/2) dt) z. Throws
/// NumericalError if the new state is not finite.
[[nodiscard]] QuadratureState step(QuadratureState state, double dt, double z_q, double z_p,
                                   const DeviceParams& params, double probe_amp,
                                   double probe_phase);

/// Largest stable step for the fast quadrature, 2 / (|alpha| + (kappa+gamma)/2).
[[nodiscard]] double max_stable_dt(const DeviceParams& params);

/// One trajectory. Initial (Q, P) is drawn from the thermal state with
/// variance n_T + 1/2 per quadrature; samples every record_stride steps.
[[nodiscard]] Trajectory simulate_trajectory(const PulseSchedule& schedule,
                                             const DeviceParams& params,
                                             const LangevinOptions& options, std::uint64_t seed);

/// Reduced (slow-variable) trajectory; fills q only.
[[nodiscard]] Trajectory simulate_reduced(const PulseSchedule& schedule, const DeviceParams& params,
                                          const LangevinOptions& options, std::uint64_t seed);

/// Counts of |Q| > q_threshold at each recorded time of an ensemble.
struct SwitchingSeries {
    std::vector<double> times;
    std::vector<std::size_t> switched;
    std::size_t n_runs = 0;

    [[nodiscard]] double probability(std::size_t i) const {
        return static_cast<double>(switched[i]) / static_cast<double>(n_runs);
    }
    /// Index of the recorded time closest to t.
    [[nodiscard]] std::size_t index_at(double t) const;
};

/// seeds[i] = trajectory_seed(base, i) for i < n.
[[nodiscard]] std::vector<std::uint64_t> sequential_seeds(std::uint64_t base, std::size_t n);

/// Runs one trajectory per seed and counts threshold crossings at every
/// recorded time. Independent of the worker count.
[[nodiscard]] SwitchingSeries run_ensemble(std::span<const std::uint64_t> seeds,
                                           const PulseSchedule& schedule,
                                           const DeviceParams& params,
                                           const LangevinOptions& options, double q_threshold);

/// |Q(t)| > q_threshold at the recorded sample nearest to t.
/// Throws std::out_of_range if t lies outside the trajectory.
[[nodiscard]] bool switch_indicator(const Trajectory& traj, double t, double q_threshold);

/// First time the reduced model started at q0 reaches q_target (< q0) under a
/// constant probe, or nullopt if not reached by t_max. Crossings inside a step
/// are detected with the Brownian-bridge probability.
[[nodiscard]] std::optional<double> first_passage_time(const DeviceParams& params, double probe_amp,
                                                       double probe_phase, double q0,
                                                       double q_target, double dt, double t_max,
                                                       std::uint64_t seed);

/// Sample mean and variance of the Q marginal at each recorded time.
struct EnsembleMoments {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> variance;
    /// Variance of Q(t) - Q(0), the displacement since the start.
    std::vector<double> displacement_variance;
    std::size_t n_runs = 0;
};

[[nodiscard]] EnsembleMoments ensemble_moments(std::span<const std::uint64_t> seeds,
                                               const PulseSchedule& schedule,
                                               const DeviceParams& params,
                                               const LangevinOptions& options);

struct AmplitudeSpectrum {
    std::vector<double> frequencies;  ///< Hz, 0 .. sample_rate/2
    std::vector<double> amplitudes;
};

enum class Quadrature { Q, P };

/// One-sided amplitude spectrum after resampling the trajectory at
/// sample_rate (linear interpolation). Throws std::invalid_argument if
/// sample_rate exceeds the recording rate.
[[nodiscard]] AmplitudeSpectrum amplitude_spectrum(const Trajectory& traj, double sample_rate,
                                                   Quadrature which = Quadrature::Q);

/// Same, for a raw uniformly sampled series.
[[nodiscard]] AmplitudeSpectrum amplitude_spectrum(std::span<const double> samples,
                                                   double sample_rate);

}  // namespace critsense

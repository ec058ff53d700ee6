#pragma once

// Closed-form results for the Kerr-free slow quadrature, an Ornstein-Uhlenbeck
// process dQ = -(s Q + F) dt + sqrt(2D) dW. s may be zero (the critical point)
// or negative (above threshold); the small-|s| limits are taken by series.

#include "critsense/langevin.hpp"
#include "critsense/model.hpp"

namespace critsense {

struct OuParams {
    double s = 0.0;      ///< curvature at Q = 0
    double d = 0.0;      ///< diffusion constant
    double force = 0.0;  ///< tilt coefficient, 0 with the probe off
    double mu0 = 0.0;
    double var0 = 0.0;

    void validate() const;
};

/// OU parameters for a device with the probe off, started from the thermal state.
[[nodiscard]] OuParams ou_from_device(const DeviceParams& params);

[[nodiscard]] double ou_mean(double t, const OuParams& p);
[[nodiscard]] double ou_variance(double t, const OuParams& p);

/// <dQ(t1) dQ(t2)> for t1 <= t2, with var0 playing the role of <dQ(0)^2>.
[[nodiscard]] double ou_autocorrelation(double t1, double t2, const OuParams& p);

/// Gaussian density with the given moments; a zero variance is not allowed here.
[[nodiscard]] double gaussian_density(double q, double mean, double variance);

/// P(|Q| > q_threshold) for a Gaussian of mean mu and standard deviation sigma.
/// sigma = 0 is the step function of |mu| against q_threshold.
[[nodiscard]] double gaussian_outside(double mu, double sigma, double q_threshold);

/// P(|Q(t)| > q_threshold) with constant parameters.
[[nodiscard]] double ou_probabilities(double t, double q_threshold, const OuParams& p);

/// Fick's-law density at s = 0, started from a point at the origin.
[[nodiscard]] double critical_density(double q, double t, const OuParams& p);

/// Passage-time law to q_target < 0 at s = 0 under a tilt force > 0.
struct FirstPassage {
    double mean = 0.0;
    double variance = 0.0;
};

/// Throws std::domain_error for force <= 0 (mean passage time diverges) or q_target >= 0.
[[nodiscard]] FirstPassage first_passage(double q_target, const OuParams& p);
[[nodiscard]] double first_passage_pdf(double t, double q_target, const OuParams& p);

/// Mean and variance of Q at time t through a pulse schedule: the pump switches
/// on at pump_on_at and the tilt acts on [t_on, t_off). Requires K = 0.
struct OuMoments {
    double mean = 0.0;
    double variance = 0.0;
};
[[nodiscard]] OuMoments ou_propagate(double t, const DeviceParams& params,
                                     const PulseSchedule& schedule);

/// P(|Q(t)| > q_threshold) through a pulse schedule, thermal start.
[[nodiscard]] double ou_switching_probability(double t, double q_threshold,
                                              const DeviceParams& params,
                                              const PulseSchedule& schedule);

}  // namespace critsense

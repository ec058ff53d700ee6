#pragma once

// Effective potential of the slow quadrature Q and its phase-diagram
// analytics.
//
//   V(Q)   = [alpha_c(Delta)^2 - |alpha|^2] Q^2/4 + 3 Delta K Q^4/2 + 3 K^2 Q^6
//   U_b(Q) = 2 / (|alpha| sin(theta - theta_P) + (kappa+gamma)/2) * V(Q) + F Q
//
// with F the probe tilt (see tilt_force). V carries units of rate^2, U of rate.

#include "critsense/model.hpp"

#include <optional>
#include <string_view>

namespace critsense {

enum class PhaseRegion { SingleWell, DoubleWell, TripleWell };

[[nodiscard]] std::string_view to_string(PhaseRegion region);

/// Prefactor 2 / (|alpha| sin(theta - theta_P) + (kappa+gamma)/2).
/// Throws std::domain_error when the denominator is not positive.
[[nodiscard]] double potential_prefactor(const DeviceParams& p);

[[nodiscard]] double reduced_potential(double q, const DeviceParams& p);
[[nodiscard]] double reduced_potential_gradient(double q, const DeviceParams& p);
[[nodiscard]] double reduced_potential_curvature(double q, const DeviceParams& p);

/// U_b(Q) for a probe of amplitude |b| and phase phi.
[[nodiscard]] double potential_value(double q, const DeviceParams& p, double probe_amp = 0.0,
                                     double probe_phase = 0.0);

/// dU_b/dQ, the negative drift of the slow-variable equation.
[[nodiscard]] double potential_gradient(double q, const DeviceParams& p, double probe_amp = 0.0,
                                        double probe_phase = 0.0);

/// Region of the (|alpha|, Delta) plane by number of potential wells. Points on
/// a boundary go to the region with fewer wells.
[[nodiscard]] PhaseRegion classify_phase(const DeviceParams& p);

struct PotentialExtrema {
    double q0 = 0.0;
    std::optional<double> q_min;  ///< positive member of the +-Q_min pair
    std::optional<double> q_max;  ///< positive member of the +-Q_max pair
    std::optional<double> v_at_min;
    std::optional<double> v_at_max;
    std::optional<double> u_at_min;
    std::optional<double> u_at_max;
    PhaseRegion region = PhaseRegion::SingleWell;
};

/// Outer minima and inner maxima of the untilted potential. Closed forms,
/// then one Newton step on dV/dQ. With K = 0 only Q0 is reported and the
/// region follows the sign of curvature_s (DoubleWell meaning "unstable").
[[nodiscard]] PotentialExtrema extrema(const DeviceParams& p);

/// Closed-form V(Q_min) = |K| Q_min^4 (Delta/2 - sqrt(|alpha|^2 - alpha_c(0)^2)).
[[nodiscard]] std::optional<double> v_at_min_closed_form(const DeviceParams& p);
/// Closed-form V(Q_max) = |K| Q_max^4 (Delta/2 + sqrt(|alpha|^2 - alpha_c(0)^2)).
[[nodiscard]] std::optional<double> v_at_max_closed_form(const DeviceParams& p);

struct Curvatures {
    double at_zero = 0.0;              ///< V''(0)
    std::optional<double> at_q_max;    ///< V''(Q_max), TripleWell only
};

[[nodiscard]] Curvatures curvatures(const DeviceParams& p);

/// Leading-order extrema close to the boundary Delta ~ sqrt(|alpha|^2 - alpha_c(0)^2):
/// V(Q_max) ~ Delta (Delta - r)^2 / (24|K|), Q_min ~ sqrt(Delta / 3|K|),
/// V(Q_min) ~ -Delta^3 / (18|K|).
struct NearThresholdApprox {
    double q_max = 0.0;
    double v_at_max = 0.0;
    double q_min = 0.0;
    double v_at_min = 0.0;
};

/// Requires Delta > 0, K < 0 and |alpha| >= alpha_c(0).
[[nodiscard]] NearThresholdApprox near_threshold_approx(const DeviceParams& p);

struct FirstOrderPoint {
    double alpha_cross = 0.0;  ///< |alpha_x| where all three minima sit at V = 0
    double q_cross_min = 0.0;  ///< positive outer minimum on that line
};

/// The line |alpha_x|^2 = alpha_c(0)^2 + Delta^2/4. The outer minima there sit at
/// Q^2 = Delta / (4|K|). Throws std::domain_error for detuning <= 0 or K = 0.
[[nodiscard]] FirstOrderPoint first_order_line(double detuning, const DeviceParams& p);

struct MeanFieldOccupations {
    double n0 = 0.0;
    std::optional<double> n_plus;
    std::optional<double> n_minus;
};

/// Stationary photon numbers N_pm = (Delta pm sqrt(|alpha|^2 - alpha_c(0)^2)) / (12|K|) - 1/2.
[[nodiscard]] MeanFieldOccupations mean_field_occupations(const DeviceParams& p);

}  // namespace critsense

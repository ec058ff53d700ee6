#pragma once

// Device and probe parameters of a pumped Kerr resonator, plus the scalar
// quantities derived from them. All rates are angular frequencies (rad/s),
// all times are seconds. Laboratory units (MHz, kHz, us) are converted only
// at the configuration boundary, see units below.

#include <numbers>

namespace critsense {

namespace units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency in MHz to angular frequency in rad/s.
constexpr double mhz_to_rad(double mhz) { return kTwoPi * mhz * 1e6; }
constexpr double rad_to_mhz(double rad) { return rad / (kTwoPi * 1e6); }
constexpr double khz_to_rad(double khz) { return kTwoPi * khz * 1e3; }
constexpr double rad_to_khz(double rad) { return rad / (kTwoPi * 1e3); }
constexpr double us_to_s(double us) { return us * 1e-6; }
constexpr double s_to_us(double s) { return s * 1e6; }
constexpr double ns_to_s(double ns) { return ns * 1e-9; }

}  // namespace units

struct DeviceParams {
    double kappa = 0.0;       ///< external coupling rate
    double gamma = 0.0;       ///< internal loss rate
    double kerr = 0.0;        ///< Kerr constant K (<= 0; 0 for a Kerr-free device)
    double detuning = 0.0;    ///< resonator minus half the pump frequency
    double pump_amp = 0.0;    ///< |alpha|
    double pump_phase = 0.0;  ///< theta_P
    double frame_phase = std::numbers::pi / 2.0;  ///< theta
    double n_thermal = 0.0;   ///< thermal occupation per mode

    /// kappa + gamma, the total linewidth.
    [[nodiscard]] double total_loss() const { return kappa + gamma; }

    /// Throws std::invalid_argument on non-finite or out-of-range fields.
    void validate() const;

    /// Copy with a different pump amplitude (used for pump-off intervals).
    [[nodiscard]] DeviceParams with_pump(double amp) const {
        DeviceParams p = *this;
        p.pump_amp = amp;
        return p;
    }
};

/// Builds parameters from ratios to kappa + gamma, the form used by the
/// phase-diagram tables. Rates are returned in rad/s.
[[nodiscard]] DeviceParams params_from_ratios(double kappa, double gamma, double alpha_over_kg,
                                              double delta_over_kg, double kerr_over_kg,
                                              double n_thermal = 0.0);

/// The reference device: kappa/2pi = 4.44 MHz, gamma/2pi = 2.30 MHz,
/// K/(kappa+gamma) = -3.12e-5, pumped at the given ratios.
[[nodiscard]] DeviceParams reference_device(double alpha_over_kg, double delta_over_kg);

struct ProbePulse {
    double amp = 0.0;    ///< |b| in sqrt(Hz); 0 is a dark run
    double phase = std::numbers::pi / 4.0;
    double t_on = 0.23e-6;
    double t_off = 1.23e-6;

    [[nodiscard]] double duration() const { return t_off - t_on; }
    [[nodiscard]] bool active_at(double t) const { return amp > 0.0 && t >= t_on && t < t_off; }
    void validate() const;
};

/// Critical pump amplitude sqrt(((kappa+gamma)/2)^2 + detuning^2).
[[nodiscard]] double alpha_critical(const DeviceParams& p);

/// Critical amplitude at zero detuning, (kappa+gamma)/2.
[[nodiscard]] inline double alpha_critical_resonant(const DeviceParams& p) {
    return 0.5 * p.total_loss();
}

/// D = (kappa+gamma)/2 * (n_T + 1/2).
[[nodiscard]] double diffusion_constant(const DeviceParams& p);

/// Curvature of the effective potential at Q = 0,
/// (alpha_c(Delta)^2 - |alpha|^2) / (alpha_c(0) + |alpha|).
[[nodiscard]] double curvature_s(const DeviceParams& p);

/// Mean photon number |b|^2 * duration carried by the probe.
[[nodiscard]] double mean_photons(const ProbePulse& pulse);

/// Linear tilt coefficient sqrt(2 kappa) |b| cos(theta/2 - phi) added to the potential.
[[nodiscard]] double tilt_force(const DeviceParams& p, double probe_amp, double probe_phase);

}  // namespace critsense

#include "critsense/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace critsense {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void DeviceParams::validate() const {
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be non-negative");
    require(std::isfinite(kerr) && kerr <= 0.0, "kerr must be non-positive");
    require(std::isfinite(detuning), "detuning must be finite");
    require(std::isfinite(pump_amp) && pump_amp >= 0.0, "pump amplitude must be non-negative");
    require(std::isfinite(pump_phase) && std::isfinite(frame_phase), "phases must be finite");
    require(std::isfinite(n_thermal) && n_thermal >= 0.0, "thermal occupation must be non-negative");
}

void ProbePulse::validate() const {
    require(std::isfinite(amp) && amp >= 0.0, "probe amplitude must be non-negative");
    require(std::isfinite(phase), "probe phase must be finite");
    require(std::isfinite(t_on) && std::isfinite(t_off) && t_on < t_off,
            "probe window requires t_on < t_off");
}

DeviceParams params_from_ratios(double kappa, double gamma, double alpha_over_kg,
                                double delta_over_kg, double kerr_over_kg, double n_thermal) {
    const double kg = kappa + gamma;
    DeviceParams p;
    p.kappa = kappa;
    p.gamma = gamma;
    p.pump_amp = alpha_over_kg * kg;
    p.detuning = delta_over_kg * kg;
    p.kerr = kerr_over_kg * kg;
    p.n_thermal = n_thermal;
    p.validate();
    return p;
}

DeviceParams reference_device(double alpha_over_kg, double delta_over_kg) {
    return params_from_ratios(units::mhz_to_rad(4.44), units::mhz_to_rad(2.30), alpha_over_kg,
                              delta_over_kg, -3.12e-5);
}

double alpha_critical(const DeviceParams& p) {
    return std::hypot(0.5 * p.total_loss(), p.detuning);
}

double diffusion_constant(const DeviceParams& p) {
    return 0.5 * p.total_loss() * (p.n_thermal + 0.5);
}

double curvature_s(const DeviceParams& p) {
    const double ac0 = alpha_critical_resonant(p);
    // alpha_c(Delta)^2 - |alpha|^2 written to avoid forming the two large squares
    const double gap = (ac0 - p.pump_amp) * (ac0 + p.pump_amp) + p.detuning * p.detuning;
    return gap / (ac0 + p.pump_amp);
}

double mean_photons(const ProbePulse& pulse) {
    pulse.validate();
    return pulse.amp * pulse.amp * pulse.duration();
}

double tilt_force(const DeviceParams& p, double probe_amp, double probe_phase) {
    return std::sqrt(2.0 * p.kappa) * probe_amp * std::cos(0.5 * p.frame_phase - probe_phase);
}

}  // namespace critsense

#include "critsense/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critsense {

namespace {

/// alpha_c(Delta)^2 - |alpha|^2
double quadratic_coefficient(const DeviceParams& p) {
    const double ac0 = alpha_critical_resonant(p);
    return (ac0 - p.pump_amp) * (ac0 + p.pump_amp) + p.detuning * p.detuning;
}

/// sqrt(|alpha|^2 - alpha_c(0)^2), or nullopt below alpha_c(0).
std::optional<double> above_resonant_threshold(const DeviceParams& p) {
    const double ac0 = alpha_critical_resonant(p);
    if (p.pump_amp <= ac0) return std::nullopt;
    return std::sqrt((p.pump_amp - ac0) * (p.pump_amp + ac0));
}

double newton_polish(double q, const DeviceParams& p) {
    const double curv = reduced_potential_curvature(q, p);
    if (curv == 0.0) return q;
    return q - reduced_potential_gradient(q, p) / curv;
}

}  // namespace

std::string_view to_string(PhaseRegion region) {
    switch (region) {
        case PhaseRegion::SingleWell: return "single_well";
        case PhaseRegion::DoubleWell: return "double_well";
        case PhaseRegion::TripleWell: return "triple_well";
    }
    return "unknown";
}

double potential_prefactor(const DeviceParams& p) {
    const double denom =
        p.pump_amp * std::sin(p.frame_phase - p.pump_phase) + 0.5 * p.total_loss();
    if (!(denom > 0.0)) {
        throw std::domain_error("effective potential prefactor is singular: "
                                "|alpha| sin(theta - theta_P) + (kappa+gamma)/2 <= 0");
    }
    return 2.0 / denom;
}

double reduced_potential(double q, const DeviceParams& p) {
    const double q2 = q * q;
    return q2 * (0.25 * quadratic_coefficient(p) +
                 q2 * (1.5 * p.detuning * p.kerr + 3.0 * p.kerr * p.kerr * q2));
}

double reduced_potential_gradient(double q, const DeviceParams& p) {
    const double q2 = q * q;
    return q * (0.5 * quadratic_coefficient(p) +
                q2 * (6.0 * p.detuning * p.kerr + 18.0 * p.kerr * p.kerr * q2));
}

double reduced_potential_curvature(double q, const DeviceParams& p) {
    const double q2 = q * q;
    return 0.5 * quadratic_coefficient(p) +
           q2 * (18.0 * p.detuning * p.kerr + 90.0 * p.kerr * p.kerr * q2);
}

double potential_value(double q, const DeviceParams& p, double probe_amp, double probe_phase) {
    return potential_prefactor(p) * reduced_potential(q, p) +
           tilt_force(p, probe_amp, probe_phase) * q;
}

double potential_gradient(double q, const DeviceParams& p, double probe_amp, double probe_phase) {
    return potential_prefactor(p) * reduced_potential_gradient(q, p) +
           tilt_force(p, probe_amp, probe_phase);
}

PhaseRegion classify_phase(const DeviceParams& p) {
    const double ac0 = alpha_critical_resonant(p);
    const double acd = alpha_critical(p);
    const double a = p.pump_amp;
    if (p.detuning > 0.0) {
        if (a <= ac0) return PhaseRegion::SingleWell;
        if (a < acd) return PhaseRegion::TripleWell;
        return PhaseRegion::DoubleWell;
    }
    return a <= acd ? PhaseRegion::SingleWell : PhaseRegion::DoubleWell;
}

std::optional<double> v_at_min_closed_form(const DeviceParams& p) {
    const auto r = above_resonant_threshold(p);
    if (!r || p.kerr >= 0.0 || p.detuning + *r <= 0.0) return std::nullopt;
    const double k = std::abs(p.kerr);
    const double q2 = (p.detuning + *r) / (6.0 * k);
    return k * q2 * q2 * (0.5 * p.detuning - *r);
}

std::optional<double> v_at_max_closed_form(const DeviceParams& p) {
    if (p.kerr >= 0.0 || classify_phase(p) != PhaseRegion::TripleWell) return std::nullopt;
    const double r = *above_resonant_threshold(p);
    const double k = std::abs(p.kerr);
    const double q2 = (p.detuning - r) / (6.0 * k);
    return k * q2 * q2 * (0.5 * p.detuning + r);
}

PotentialExtrema extrema(const DeviceParams& p) {
    PotentialExtrema out;
    if (p.kerr == 0.0) {
        out.region = curvature_s(p) > 0.0 ? PhaseRegion::SingleWell : PhaseRegion::DoubleWell;
        return out;
    }
    out.region = classify_phase(p);
    if (out.region == PhaseRegion::SingleWell) return out;

    const double k = std::abs(p.kerr);
    const double r = *above_resonant_threshold(p);
    const double pref = potential_prefactor(p);

    const double q_min = newton_polish(std::sqrt((p.detuning + r) / (6.0 * k)), p);
    out.q_min = q_min;
    out.v_at_min = reduced_potential(q_min, p);
    out.u_at_min = pref * *out.v_at_min;

    if (out.region == PhaseRegion::TripleWell) {
        const double q_max = newton_polish(std::sqrt((p.detuning - r) / (6.0 * k)), p);
        out.q_max = q_max;
        out.v_at_max = reduced_potential(q_max, p);
        out.u_at_max = pref * *out.v_at_max;
    }
    return out;
}

Curvatures curvatures(const DeviceParams& p) {
    Curvatures c;
    c.at_zero = 0.5 * quadratic_coefficient(p);
    if (p.kerr < 0.0 && classify_phase(p) == PhaseRegion::TripleWell) {
        const double r = *above_resonant_threshold(p);
        const double k = std::abs(p.kerr);
        const double q2 = (p.detuning - r) / (6.0 * k);
        c.at_q_max = -12.0 * k * q2 * r;
    }
    return c;
}

NearThresholdApprox near_threshold_approx(const DeviceParams& p) {
    if (!(p.detuning > 0.0) || !(p.kerr < 0.0)) {
        throw std::domain_error("near-threshold approximation needs Delta > 0 and K < 0");
    }
    const double ac0 = alpha_critical_resonant(p);
    if (p.pump_amp < ac0) {
        throw std::domain_error("near-threshold approximation needs |alpha| >= alpha_c(0)");
    }
    const double r = std::sqrt((p.pump_amp - ac0) * (p.pump_amp + ac0));
    const double k = std::abs(p.kerr);
    const double d = p.detuning;
    NearThresholdApprox a;
    a.q_max = std::sqrt(std::max(d - r, 0.0) / (6.0 * k));
    a.v_at_max = d * (d - r) * (d - r) / (24.0 * k);
    a.q_min = std::sqrt(d / (3.0 * k));
    a.v_at_min = -d * d * d / (18.0 * k);
    return a;
}

FirstOrderPoint first_order_line(double detuning, const DeviceParams& p) {
    if (!(detuning > 0.0)) throw std::domain_error("first-order line needs Delta > 0");
    if (!(p.kerr < 0.0)) throw std::domain_error("first-order line needs K < 0");
    const double ac0 = alpha_critical_resonant(p);
    FirstOrderPoint pt;
    pt.alpha_cross = std::sqrt(ac0 * ac0 + 0.25 * detuning * detuning);
    pt.q_cross_min = std::sqrt(detuning / (4.0 * std::abs(p.kerr)));
    return pt;
}

MeanFieldOccupations mean_field_occupations(const DeviceParams& p) {
    MeanFieldOccupations m;
    const auto r = above_resonant_threshold(p);
    if (!r || p.kerr >= 0.0) return m;
    const double k12 = 12.0 * std::abs(p.kerr);
    m.n_plus = (p.detuning + *r) / k12 - 0.5;
    m.n_minus = (p.detuning - *r) / k12 - 0.5;
    return m;
}

}  // namespace critsense

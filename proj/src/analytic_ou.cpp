#include "critsense/analytic_ou.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace critsense {

namespace {

/// (e^x - 1) / x, with the series near 0.
double phi1(double x) {
    if (std::abs(x) < 1e-6) return 1.0 + x * (0.5 + x / 6.0);
    return std::expm1(x) / x;
}

void require_time(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
}

}  // namespace

void OuParams::validate() const {
    if (!(d > 0.0) || !(var0 >= 0.0) || !std::isfinite(s) || !std::isfinite(force) ||
        !std::isfinite(mu0)) {
        throw std::invalid_argument("OU parameters need d > 0, var0 >= 0 and finite values");
    }
}

OuParams ou_from_device(const DeviceParams& params) {
    OuParams p;
    p.s = curvature_s(params);
    p.d = diffusion_constant(params);
    p.var0 = params.n_thermal + 0.5;
    return p;
}

double ou_mean(double t, const OuParams& p) {
    require_time(t);
    return p.mu0 * std::exp(-p.s * t) - p.force * t * phi1(-p.s * t);
}

double ou_variance(double t, const OuParams& p) {
    require_time(t);
    return p.var0 * std::exp(-2.0 * p.s * t) + 2.0 * p.d * t * phi1(-2.0 * p.s * t);
}

double ou_autocorrelation(double t1, double t2, const OuParams& p) {
    require_time(t1);
    if (t2 < t1) throw std::invalid_argument("autocorrelation needs t1 <= t2");
    return std::exp(-p.s * (t2 - t1)) * 2.0 * p.d * t1 * phi1(-2.0 * p.s * t1) +
           std::exp(-p.s * (t1 + t2)) * p.var0;
}

double gaussian_density(double q, double mean, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("variance must be positive");
    const double z = q - mean;
    return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double gaussian_outside(double mu, double sigma, double q_threshold) {
    if (!(q_threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    if (sigma == 0.0) return std::abs(mu) > q_threshold ? 1.0 : 0.0;
    const double scale = std::numbers::sqrt2 * sigma;
    // erfc keeps the small tails accurate
    return 0.5 * std::erfc((q_threshold + mu) / scale) + 0.5 * std::erfc((q_threshold - mu) / scale);
}

double ou_probabilities(double t, double q_threshold, const OuParams& p) {
    return gaussian_outside(ou_mean(t, p), std::sqrt(std::max(ou_variance(t, p), 0.0)),
                            q_threshold);
}

double critical_density(double q, double t, const OuParams& p) {
    if (!(t > 0.0)) throw std::invalid_argument("critical density needs t > 0");
    return gaussian_density(q, -p.force * t, 2.0 * p.d * t);
}

FirstPassage first_passage(double q_target, const OuParams& p) {
    if (!(q_target < 0.0)) throw std::domain_error("passage target must be negative");
    if (!(p.force > 0.0)) {
        throw std::domain_error("mean passage time diverges without a tilt toward the target");
    }
    const double dist = -q_target;
    return {dist / p.force, 2.0 * dist * p.d / (p.force * p.force * p.force)};
}

double first_passage_pdf(double t, double q_target, const OuParams& p) {
    if (!(t > 0.0)) return 0.0;
    const double dist = std::abs(q_target);
    const double z = q_target + p.force * t;
    // log form so tiny t underflows to 0 instead of inf * 0
    return std::exp(std::log(dist) - 0.5 * std::log(4.0 * std::numbers::pi * p.d) -
                    1.5 * std::log(t) - z * z / (4.0 * p.d * t));
}

OuMoments ou_propagate(double t, const DeviceParams& params, const PulseSchedule& schedule) {
    require_time(t);
    if (params.kerr != 0.0) throw std::invalid_argument("closed-form moments need K = 0");
    std::vector<double> edges{0.0};
    for (double e : {schedule.pump_on_at, schedule.probe.t_on, schedule.probe.t_off}) {
        if (e > 0.0 && e < t) edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end());
    edges.push_back(t);

    OuMoments m{0.0, params.n_thermal + 0.5};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double mid = 0.5 * (edges[i] + edges[i + 1]);
        const DeviceParams dev =
            mid >= schedule.pump_on_at ? params : params.with_pump(0.0);
        OuParams p;
        p.s = curvature_s(dev);
        p.d = diffusion_constant(dev);
        p.force = schedule.probe.active_at(mid)
                      ? tilt_force(dev, schedule.probe.amp, schedule.probe.phase)
                      : 0.0;
        p.mu0 = m.mean;
        p.var0 = m.variance;
        const double span = edges[i + 1] - edges[i];
        m = {ou_mean(span, p), ou_variance(span, p)};
    }
    return m;
}

double ou_switching_probability(double t, double q_threshold, const DeviceParams& params,
                                const PulseSchedule& schedule) {
    const OuMoments m = ou_propagate(t, params, schedule);
    return gaussian_outside(m.mean, std::sqrt(std::max(m.variance, 0.0)), q_threshold);
}

}  // namespace critsense

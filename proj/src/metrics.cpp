#include "critsense/metrics.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace critsense {

CorrectedProbability corrected_p1plus(double p1plus_raw, double p_dark) {
    if (!(p_dark < 1.0)) throw std::domain_error("p_dark = 1: detector is always on");
    const double v = (p1plus_raw - p_dark) / (1.0 - p_dark);
    return {v, v < 0.0};
}

double efficiency(double p1plus_raw, double p_dark, double n_bar) {
    if (!(n_bar > 0.0)) throw std::domain_error("mean photon number must be positive");
    if (!(p_dark < 1.0)) throw std::domain_error("p_dark = 1: detector is always on");
    if (!(p1plus_raw < 1.0)) throw std::domain_error("P_1+ = 1: efficiency saturates");
    return std::log((1.0 - p_dark) / (1.0 - p1plus_raw)) / n_bar;
}

RateFit fit_rates(std::span<const double> times, std::span<const double> probability,
                  double t_on, double window_lo, double window_hi, double monotone_tolerance) {
    if (times.size() != probability.size()) {
        throw std::invalid_argument("times and probabilities differ in length");
    }
    RateFit fit;
    double sxx = 0.0, sxy = 0.0;
    double prev = -1.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_lo || times[i] > window_hi) continue;
        const double p = probability[i];
        if (p >= 1.0) {
            fit.status = FitStatus::Saturated;
            return fit;
        }
        if (prev >= 0.0 && p < prev - monotone_tolerance) fit.status = FitStatus::NonMonotone;
        prev = p;
        const double x = times[i] - t_on;
        const double y = -std::log1p(-p);
        sxx += x * x;
        sxy += x * y;
        ++fit.n_points;
    }
    if (fit.n_points < 2 || sxx == 0.0) {
        fit.status = FitStatus::TooFewPoints;
        return fit;
    }
    fit.rate = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_lo || times[i] > window_hi) continue;
        const double r = -std::log1p(-probability[i]) - fit.rate * (times[i] - t_on);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(fit.n_points));
    return fit;
}

double rate_efficiency(double rate_probe, double rate_dark, double probe_amp) {
    if (!(probe_amp > 0.0)) throw std::domain_error("probe amplitude must be positive");
    return (rate_probe - rate_dark) / (probe_amp * probe_amp);
}

double normal_quantile(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
    const boost::math::normal standard;
    return boost::math::quantile(standard, 0.5 + 0.5 * confidence);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0 || successes > trials) {
        throw std::invalid_argument("need 0 <= successes <= trials and trials >= 1");
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + 0.5 * z2 / n) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + 0.25 * z2 / (n * n)) / denom;
    Interval ci{centre - half, centre + half};
    if (successes == 0) ci.low = 0.0;
    if (successes == trials) ci.high = 1.0;
    return ci;
}

Interval binomial_ci(std::size_t successes, std::size_t trials, double confidence) {
    return wilson_interval(successes, trials, normal_quantile(confidence));
}

double binomial_sigma(double p, std::size_t trials) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

namespace {

void fill_derived(SwitchingStats& s, double n_bar, double saturation_level) {
    if (s.p_dark < 1.0) {
        const CorrectedProbability c = corrected_p1plus(s.p1plus_raw, s.p_dark);
        s.p1plus_corrected = c.value;
        s.corrected_negative = c.negative;
    } else {
        s.p1plus_corrected = std::numeric_limits<double>::quiet_NaN();
    }
    s.saturated = s.p1plus_raw >= saturation_level || s.p_dark >= 1.0;
    // no probe photons: eta is undefined but the counts are still meaningful
    s.eta = s.saturated || !(n_bar > 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                          : efficiency(s.p1plus_raw, s.p_dark, n_bar);
}

}  // namespace

SwitchingStats switching_stats(double time, std::size_t dark_switched, std::size_t probe_switched,
                               std::size_t n_runs, double n_bar, double confidence) {
    if (n_runs == 0) throw std::invalid_argument("n_runs must be positive");
    SwitchingStats s;
    s.time = time;
    s.n_runs = n_runs;
    const double n = static_cast<double>(n_runs);
    s.p_dark = static_cast<double>(dark_switched) / n;
    s.p1plus_raw = static_cast<double>(probe_switched) / n;
    s.ci = binomial_ci(probe_switched, n_runs, confidence);
    fill_derived(s, n_bar, 1.0 - 0.5 / n);
    return s;
}

SwitchingStats switching_stats_exact(double time, double p_dark, double p1plus, double n_bar) {
    SwitchingStats s;
    s.time = time;
    s.p_dark = p_dark;
    s.p1plus_raw = p1plus;
    s.ci = {p1plus, p1plus};
    fill_derived(s, n_bar, 1.0);
    return s;
}

}  // namespace critsense

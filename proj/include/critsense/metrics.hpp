#pragma once

// Detector figures of merit built from switching probabilities.

#include <cstddef>
#include <span>

namespace critsense {

struct CorrectedProbability {
    double value = 0.0;
    bool negative = false;  ///< set when a fluctuation pushed P_1+ below p_dark
};

/// (P_1+ - p_dark) / (1 - p_dark). Negative values are kept and flagged.
/// Throws std::domain_error for p_dark = 1.
[[nodiscard]] CorrectedProbability corrected_p1plus(double p1plus_raw, double p_dark);

/// (1/n_bar) ln[(1 - p_dark) / (1 - P_1+)]. Throws std::domain_error when
/// P_1+ = 1 (saturated), p_dark = 1 or n_bar <= 0.
[[nodiscard]] double efficiency(double p1plus_raw, double p_dark, double n_bar);

enum class FitStatus { Ok, NonMonotone, Saturated, TooFewPoints };

struct RateFit {
    double rate = 0.0;      ///< 1/s
    double residual = 0.0;  ///< rms of -ln(1-p) about the fit
    std::size_t n_points = 0;
    FitStatus status = FitStatus::Ok;

    [[nodiscard]] bool ok() const { return status == FitStatus::Ok; }
};

/// Least-squares fit of -ln(1 - p) = rate (t - t_on) through the origin, using
/// samples with window_lo <= t <= window_hi. A drop larger than
/// monotone_tolerance between consecutive samples marks the series NonMonotone.
[[nodiscard]] RateFit fit_rates(std::span<const double> times, std::span<const double> probability,
                                double t_on, double window_lo, double window_hi,
                                double monotone_tolerance = 1e-9);

/// (Gamma_b - Gamma_dark) / |b|^2.
[[nodiscard]] double rate_efficiency(double rate_probe, double rate_dark, double probe_amp);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson-score interval with a two-sided normal quantile for `confidence`.
[[nodiscard]] Interval binomial_ci(std::size_t successes, std::size_t trials,
                                   double confidence = 0.95);

/// Wilson-score interval for an explicit z (3 gives a "3 sigma" band).
[[nodiscard]] Interval wilson_interval(std::size_t successes, std::size_t trials, double z);

/// Two-sided standard normal quantile for a confidence level.
[[nodiscard]] double normal_quantile(double confidence);

/// Binomial standard error sqrt(p(1-p)/n).
[[nodiscard]] double binomial_sigma(double p, std::size_t trials);

struct SwitchingStats {
    double time = 0.0;
    double p_dark = 0.0;
    double p1plus_raw = 0.0;
    double p1plus_corrected = 0.0;
    bool corrected_negative = false;
    double eta = 0.0;
    bool saturated = false;  ///< eta undefined, P_1+ at or near 1
    std::size_t n_runs = 0;
    Interval ci;             ///< on p1plus_raw
};

/// Statistics from raw counts. Saturation is P_1+ >= 1 - 1/(2 n_runs); eta is NaN then.
[[nodiscard]] SwitchingStats switching_stats(double time, std::size_t dark_switched,
                                             std::size_t probe_switched, std::size_t n_runs,
                                             double n_bar, double confidence = 0.95);

/// Same from probabilities of a deterministic engine (n_runs = 0, zero-width CI).
[[nodiscard]] SwitchingStats switching_stats_exact(double time, double p_dark, double p1plus,
                                                   double n_bar);

}  // namespace critsense

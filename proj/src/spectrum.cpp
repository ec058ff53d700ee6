#include "critsense/langevin.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace critsense {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

AmplitudeSpectrum amplitude_spectrum(std::span<const double> samples, double sample_rate) {
    if (samples.empty()) throw std::invalid_argument("empty series");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
    const std::size_t n = samples.size();
    const std::size_t n_out = n / 2 + 1;

    std::unique_ptr<double, FftwDeleter> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwDeleter> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_out)));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    std::copy(samples.begin(), samples.end(), in.get());
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    AmplitudeSpectrum s;
    s.frequencies.resize(n_out);
    s.amplitudes.resize(n_out);
    const double norm = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n_out; ++k) {
        s.frequencies[k] = static_cast<double>(k) * sample_rate / static_cast<double>(n);
        const double mag = std::hypot(out.get()[k][0], out.get()[k][1]) * norm;
        // one-sided: fold negative frequencies except DC and the Nyquist bin
        const bool unique = k == 0 || (n % 2 == 0 && k == n / 2);
        s.amplitudes[k] = unique ? mag : 2.0 * mag;
    }
    return s;
}

AmplitudeSpectrum amplitude_spectrum(const Trajectory& traj, double sample_rate,
                                     Quadrature which) {
    if (traj.times.size() < 2) throw std::invalid_argument("trajectory too short for a spectrum");
    const auto& series = which == Quadrature::Q ? traj.q : traj.p;
    if (series.size() != traj.times.size()) {
        throw std::invalid_argument("trajectory has no samples for the requested quadrature");
    }
    const double spacing = traj.times[1] - traj.times[0];
    const double record_rate = 1.0 / spacing;
    if (sample_rate > record_rate * (1.0 + 1e-12)) {
        throw std::invalid_argument("sample rate exceeds the recording rate");
    }
    const double t0 = traj.times.front();
    const double span = traj.times.back() - t0;
    const auto n = static_cast<std::size_t>(std::floor(span * sample_rate * (1.0 + 1e-12))) + 1;
    std::vector<double> resampled(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / sample_rate / spacing;
        const auto j = std::min(static_cast<std::size_t>(x), series.size() - 1);
        const double frac = x - static_cast<double>(j);
        resampled[i] = j + 1 < series.size() ? series[j] + frac * (series[j + 1] - series[j])
                                             : series[j];
    }
    return amplitude_spectrum(resampled, sample_rate);
}

}  // namespace critsense

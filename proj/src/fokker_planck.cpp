#include "critsense/fokker_planck.hpp"

#include "critsense/errors.hpp"
#include "critsense/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace critsense {

namespace {

/// Bernoulli function x / (e^x - 1).
double bernoulli(double x) {
    if (std::abs(x) < 1e-6) return 1.0 - 0.5 * x + x * x / 12.0;
    return x / std::expm1(x);
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

/// Exponentially fitted face coefficients for one drift setting:
/// F_{i+1/2} = right[i] W_i - left[i] W_{i+1}.
struct FaceFluxes {
    std::vector<double> right;
    std::vector<double> left;
};

FaceFluxes face_fluxes(const std::vector<double>& q, const DeviceParams& params, double probe_amp,
                       double probe_phase) {
    const std::size_t n_faces = q.size() - 1;
    const double h = q[1] - q[0];
    const double d = diffusion_constant(params);
    FaceFluxes f;
    f.right.resize(n_faces);
    f.left.resize(n_faces);
    for (std::size_t i = 0; i < n_faces; ++i) {
        const double qf = 0.5 * (q[i] + q[i + 1]);
        const double velocity = -potential_gradient(qf, params, probe_amp, probe_phase);
        const double peclet = velocity * h / d;
        f.right[i] = d / h * bernoulli(-peclet);
        f.left[i] = d / h * bernoulli(peclet);
    }
    return f;
}

// Steps one density through a piecewise-constant sequence of operators.
class Evolver {
public:
    Evolver(const DeviceParams& params, const PulseSchedule& schedule,
            const FokkerPlanckOptions& options, DensityGrid& w, EvolveStats& stats)
        : params_(params), schedule_(schedule), options_(options), w_(w), stats_(stats) {
        weights_ = trapezoid_weights(w.q_values.size(), w.spacing());
        const std::size_t n = w.q_values.size();
        lower_.resize(n);
        diag_.resize(n);
        upper_.resize(n);
        rhs_.resize(n);
        scratch_.resize(n);
    }

    /// Advance to t_end with no operator change inside the interval.
    void advance_segment(double t_end, std::size_t& startup_left) {
        const double length = t_end - w_.time;
        if (length <= 0.0) return;
        if (length < 1e-6 * options_.dt) {
            // round-off sliver between an output time and a pulse edge
            w_.time = t_end;
            return;
        }
        const auto n_steps = static_cast<std::size_t>(
            std::max(1.0, std::ceil(length / options_.dt - 1e-9)));
        const double h_t = length / static_cast<double>(n_steps);
        const FaceFluxes& flux = fluxes_at(w_.time + 0.5 * h_t);
        const double t0 = w_.time;
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double theta = startup_left > 0 ? 1.0 : 0.5;
            if (startup_left > 0) --startup_left;
            take_step(flux, h_t, theta);
            w_.time = (k + 1 == n_steps) ? t_end : t0 + static_cast<double>(k + 1) * h_t;
            check_mass();
        }
    }

private:
    const FaceFluxes& fluxes_at(double t) {
        const bool pump = t >= schedule_.pump_on_at;
        const bool probe = schedule_.probe.active_at(t);
        auto& slot = cache_[pump][probe];
        if (slot.right.empty()) {
            const DeviceParams p = pump ? params_ : params_.with_pump(0.0);
            slot = face_fluxes(w_.q_values, p, probe ? schedule_.probe.amp : 0.0,
                               schedule_.probe.phase);
        }
        return slot;
    }

    // (I - theta h M) W' = (I + (1 - theta) h M) W, M from the face fluxes.
    void take_step(const FaceFluxes& f, double h_t, double theta) {
        const std::size_t n = w_.weights.size();
        auto& W = w_.weights;
        // rhs = W + (1-theta) h M W, computed from fluxes directly
        const double explicit_part = (1.0 - theta) * h_t;
        for (std::size_t i = 0; i < n; ++i) {
            double div = 0.0;
            if (i + 1 < n) div += f.right[i] * W[i] - f.left[i] * W[i + 1];
            if (i > 0) div -= f.right[i - 1] * W[i - 1] - f.left[i - 1] * W[i];
            rhs_[i] = W[i] - explicit_part * div / weights_[i];
        }
        const double implicit_part = theta * h_t;
        for (std::size_t i = 0; i < n; ++i) {
            const double inv_w = implicit_part / weights_[i];
            double d = 0.0;
            if (i + 1 < n) d += f.right[i];
            if (i > 0) d += f.left[i - 1];
            diag_[i] = 1.0 + inv_w * d;
            upper_[i] = i + 1 < n ? -inv_w * f.left[i] : 0.0;
            lower_[i] = i > 0 ? -inv_w * f.right[i - 1] : 0.0;
        }
        solve_tridiagonal();
        bool clipped = false;
        for (double& x : W) {
            if (x < 0.0) {
                x = 0.0;
                clipped = true;
            }
        }
        if (clipped) {
            ++stats_.clipped_steps;
            const double m = total_mass(w_);
            for (double& x : W) x /= m;
        }
        ++stats_.steps;
    }

    // Thomas algorithm; the matrix is diagonally dominant (M-matrix).
    void solve_tridiagonal() {
        const std::size_t n = diag_.size();
        auto& W = w_.weights;
        scratch_[0] = upper_[0] / diag_[0];
        W[0] = rhs_[0] / diag_[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = diag_[i] - lower_[i] * scratch_[i - 1];
            scratch_[i] = upper_[i] / m;
            W[i] = (rhs_[i] - lower_[i] * W[i - 1]) / m;
        }
        for (std::size_t i = n - 1; i-- > 0;) W[i] -= scratch_[i] * W[i + 1];
    }

    void check_mass() {
        const double err = std::abs(1.0 - total_mass(w_));
        stats_.max_mass_error = std::max(stats_.max_mass_error, err);
        if (!(err <= options_.max_mass_drift)) {
            throw NumericalError("Fokker-Planck mass drift " + std::to_string(err), w_.time);
        }
    }

    const DeviceParams& params_;
    const PulseSchedule& schedule_;
    const FokkerPlanckOptions& options_;
    DensityGrid& w_;
    EvolveStats& stats_;
    std::vector<double> weights_, lower_, diag_, upper_, rhs_, scratch_;
    FaceFluxes cache_[2][2];
};

/// Times in (from, to) at which the operator changes.
std::vector<double> breakpoints(const PulseSchedule& s, double from, double to) {
    std::vector<double> out;
    for (double t : {s.pump_on_at, s.probe.t_on, s.probe.t_off}) {
        if (t > from && t < to) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void advance(Evolver& ev, DensityGrid& w, const PulseSchedule& schedule, double t_target,
             std::size_t& startup_left) {
    for (double edge : breakpoints(schedule, w.time, t_target)) ev.advance_segment(edge, startup_left);
    ev.advance_segment(t_target, startup_left);
}

/// Integral of the piecewise-linear interpolant of w over [a, b].
double integrate_linear(const DensityGrid& w, double a, double b) {
    const auto& q = w.q_values;
    const auto& W = w.weights;
    const double h = w.spacing();
    double total = 0.0;
    const auto first = static_cast<std::size_t>(std::max(0.0, std::floor((a - q.front()) / h)));
    for (std::size_t i = first; i + 1 < q.size() && q[i] < b; ++i) {
        const double lo = std::max(a, q[i]);
        const double hi = std::min(b, q[i + 1]);
        if (hi <= lo) continue;
        const double slope = (W[i + 1] - W[i]) / h;
        const double f_lo = W[i] + slope * (lo - q[i]);
        const double f_hi = W[i] + slope * (hi - q[i]);
        total += 0.5 * (f_lo + f_hi) * (hi - lo);
    }
    return total;
}

}  // namespace

void GridSpec::validate() const {
    if (!(q_cap > 0.0) || n_points < 3) {
        throw std::invalid_argument("grid needs q_cap > 0 and at least 3 points");
    }
}

void FokkerPlanckOptions::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("Fokker-Planck time step must be positive");
    }
}

GridSpec default_grid(const DeviceParams& params, std::size_t n_points) {
    const double s_floor = 1e-3 * params.total_loss();
    const double s = std::max(curvature_s(params), s_floor);
    double q_cap = 10.0 * std::sqrt(diffusion_constant(params) / s);
    if (params.kerr < 0.0) {
        const PotentialExtrema ex = extrema(params);
        if (ex.q_min) q_cap = std::max(q_cap, 1.5 * *ex.q_min);
    }
    return {q_cap, n_points};
}

DensityGrid init_density(const InitialDensity& init, const GridSpec& grid, double n_thermal) {
    grid.validate();
    DensityGrid w;
    w.q_values.resize(grid.n_points);
    const double h = grid.spacing();
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        w.q_values[i] = -grid.q_cap + static_cast<double>(i) * h;
    }
    w.q_values.back() = grid.q_cap;

    double mu = 0.0;
    double sigma = std::sqrt(n_thermal + 0.5);
    switch (init.kind) {
        case InitialKind::Thermal: break;
        case InitialKind::DeltaAt:
            if (!(std::abs(init.center) < grid.q_cap)) {
                throw std::invalid_argument("delta start lies outside the grid");
            }
            mu = init.center;
            sigma = 2.0 * h;
            break;
        case InitialKind::Gaussian:
            if (!(init.sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
            mu = init.center;
            sigma = init.sigma;
            break;
    }
    w.weights.resize(grid.n_points);
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double z = (w.q_values[i] - mu) / sigma;
        w.weights[i] = norm * std::exp(-0.5 * z * z);
    }
    const double m = total_mass(w);
    for (double& x : w.weights) x /= m;
    return w;
}

double total_mass(const DensityGrid& w) {
    const auto& W = w.weights;
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < W.size(); ++i) sum += W[i];
    return w.spacing() * (sum + 0.5 * (W.front() + W.back()));
}

double density_mean(const DensityGrid& w) {
    const auto wt = trapezoid_weights(w.weights.size(), w.spacing());
    double m = 0.0, mq = 0.0;
    for (std::size_t i = 0; i < wt.size(); ++i) {
        m += wt[i] * w.weights[i];
        mq += wt[i] * w.weights[i] * w.q_values[i];
    }
    return mq / m;
}

double density_variance(const DensityGrid& w) {
    const auto wt = trapezoid_weights(w.weights.size(), w.spacing());
    const double mu = density_mean(w);
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < wt.size(); ++i) {
        const double d = w.q_values[i] - mu;
        m += wt[i] * w.weights[i];
        m2 += wt[i] * w.weights[i] * d * d;
    }
    return m2 / m;
}

DensityGrid evolve(DensityGrid w, const DeviceParams& params, const PulseSchedule& schedule,
                   double t_target, const FokkerPlanckOptions& options, EvolveStats* stats) {
    params.validate();
    schedule.probe.validate();
    options.validate();
    if (t_target < w.time) throw std::invalid_argument("cannot evolve backwards in time");
    EvolveStats local;
    EvolveStats& st = stats ? *stats : local;
    Evolver ev(params, schedule, options, w, st);
    std::size_t startup =
        w.steps_taken < options.startup_steps ? options.startup_steps - w.steps_taken : 0;
    const std::size_t before = st.steps;
    advance(ev, w, schedule, t_target, startup);
    w.steps_taken += st.steps - before;
    return w;
}

double probability_outside(const DensityGrid& w, double q_threshold) {
    const double cap = w.q_values.back();
    if (!(q_threshold > 0.0) || !(q_threshold < cap)) {
        throw std::invalid_argument("threshold must lie inside the grid");
    }
    // round-off in 1 - integral can dip just below 0
    return std::clamp(1.0 - integrate_linear(w, -q_threshold, q_threshold), 0.0, 1.0);
}

ProbabilitySeries run_fp(const PulseSchedule& schedule, const DeviceParams& params,
                         double q_threshold, std::span<const double> output_times,
                         const FokkerPlanckRun& run) {
    params.validate();
    schedule.validate();
    run.options.validate();
    if (!std::is_sorted(output_times.begin(), output_times.end())) {
        throw std::invalid_argument("output times must be ascending");
    }
    DensityGrid w = init_density(run.initial, run.grid, params.n_thermal);
    ProbabilitySeries out;
    Evolver ev(params, schedule, run.options, w, out.stats);
    std::size_t startup = run.options.startup_steps;
    for (double t : output_times) {
        if (t < 0.0) throw std::invalid_argument("output times must be non-negative");
        advance(ev, w, schedule, t, startup);
        out.times.push_back(t);
        out.probability.push_back(probability_outside(w, q_threshold));
        out.mass.push_back(total_mass(w));
    }
    return out;
}

ProbabilitySeries run_fp(const PulseSchedule& schedule, const DeviceParams& params,
                         double q_threshold, std::span<const double> output_times) {
    FokkerPlanckRun run;
    run.grid = default_grid(params);
    return run_fp(schedule, params, q_threshold, output_times, run);
}

std::vector<double> time_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad time grid");
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = lo + static_cast<double>(i) * step;
    t.back() = hi;
    return t;
}

}  // namespace critsense

#include "critsense/langevin.hpp"

#include "critsense/errors.hpp"
#include "critsense/parallel.hpp"
#include "critsense/potential.hpp"
#include "critsense/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace critsense {

namespace {

// Linear and cubic coefficients of the full drift for one (pump, probe) setting.
struct FullCoefficients {
    double qq = 0.0, qp = 0.0, pp = 0.0, pq = 0.0;
    double kerr6 = 0.0;
    double force_q = 0.0, force_p = 0.0;

    FullCoefficients(const DeviceParams& p, double probe_amp, double probe_phase) {
        const double half_loss = 0.5 * p.total_loss();
        const double s = std::sin(p.frame_phase - p.pump_phase);
        const double c = std::cos(p.frame_phase - p.pump_phase);
        qq = p.pump_amp * s - half_loss;
        qp = p.detuning - p.pump_amp * c;
        pp = -(p.pump_amp * s + half_loss);
        pq = -(p.detuning + p.pump_amp * c);
        kerr6 = 6.0 * p.kerr;
        const double drive = std::sqrt(2.0 * p.kappa) * probe_amp;
        force_q = drive * std::cos(0.5 * p.frame_phase - probe_phase);
        force_p = drive * std::sin(0.5 * p.frame_phase - probe_phase);
    }

    [[nodiscard]] QuadratureDrift operator()(double q, double p) const {
        const double r2 = q * q + p * p;
        return {qq * q + qp * p + kerr6 * p * r2 - force_q,
                pp * p + pq * q - kerr6 * q * r2 - force_p};
    }
};

// -dU_b/dQ as an odd quintic plus constant.
struct ReducedCoefficients {
    double c1 = 0.0, c3 = 0.0, c5 = 0.0, force = 0.0;

    ReducedCoefficients(const DeviceParams& p, double probe_amp, double probe_phase) {
        const double pref = potential_prefactor(p);
        const double ac0 = alpha_critical_resonant(p);
        const double quad = (ac0 - p.pump_amp) * (ac0 + p.pump_amp) + p.detuning * p.detuning;
        c1 = pref * 0.5 * quad;
        c3 = pref * 6.0 * p.detuning * p.kerr;
        c5 = pref * 18.0 * p.kerr * p.kerr;
        force = tilt_force(p, probe_amp, probe_phase);
    }

    [[nodiscard]] double operator()(double q) const {
        const double q2 = q * q;
        return -(q * (c1 + q2 * (c3 + c5 * q2)) + force);
    }
};

struct StepIndices {
    long long n_steps = 0;
    long long pump_on = 0;
    long long probe_on = 0;
    long long probe_off = 0;
};

StepIndices step_indices(const PulseSchedule& schedule, double dt) {
    StepIndices idx;
    idx.n_steps = std::llround(schedule.t_end / dt);
    idx.pump_on = std::llround(schedule.pump_on_at / dt);
    idx.probe_on = std::llround(schedule.probe.t_on / dt);
    idx.probe_off = std::llround(schedule.probe.t_off / dt);
    return idx;
}

double noise_amplitude(const DeviceParams& p, double dt) {
    return std::sqrt(p.total_loss() * (p.n_thermal + 0.5) * dt);
}

// Drives one full-model trajectory, calling record(k, q, p) at every
// record_stride-th step index.
template <typename Record>
void integrate_full(const PulseSchedule& schedule, const DeviceParams& params,
                    const LangevinOptions& options, std::uint64_t seed, Record&& record) {
    const double dt = options.dt;
    const StepIndices idx = step_indices(schedule, dt);
    const DeviceParams pump_off = params.with_pump(0.0);
    const double amp = schedule.probe.amp;
    const double phase = schedule.probe.phase;
    // [pump on][probe on]
    const FullCoefficients coeff[2][2] = {
        {FullCoefficients(pump_off, 0.0, phase), FullCoefficients(pump_off, amp, phase)},
        {FullCoefficients(params, 0.0, phase), FullCoefficients(params, amp, phase)}};
    const double sigma = noise_amplitude(params, dt);

    NormalSource normal(seed);
    const double sd0 = std::sqrt(params.n_thermal + 0.5);
    double q = sd0 * normal();
    double p = sd0 * normal();

    const std::size_t stride = options.record_stride;
    for (long long k = 0;; ++k) {
        if (static_cast<std::size_t>(k) % stride == 0) record(k, q, p);
        if (k >= idx.n_steps) break;
        const bool pump = k >= idx.pump_on;
        const bool probe = amp > 0.0 && k >= idx.probe_on && k < idx.probe_off;
        QuadratureDrift f{};
        if (options.drift_enabled) f = coeff[pump][probe](q, p);
        const double zq = normal();
        const double zp = normal();
        q += f.dq_dt * dt - sigma * zq;
        p += f.dp_dt * dt - sigma * zp;
        if (!std::isfinite(q) || !std::isfinite(p)) {
            throw NumericalError("non-finite quadrature state", static_cast<double>(k + 1) * dt);
        }
    }
}

template <typename Record>
void integrate_reduced(const PulseSchedule& schedule, const DeviceParams& params,
                       const LangevinOptions& options, std::uint64_t seed, Record&& record) {
    const double dt = options.dt;
    const StepIndices idx = step_indices(schedule, dt);
    const DeviceParams pump_off = params.with_pump(0.0);
    const double amp = schedule.probe.amp;
    const double phase = schedule.probe.phase;
    const ReducedCoefficients coeff[2][2] = {
        {ReducedCoefficients(pump_off, 0.0, phase), ReducedCoefficients(pump_off, amp, phase)},
        {ReducedCoefficients(params, 0.0, phase), ReducedCoefficients(params, amp, phase)}};
    const double sigma = noise_amplitude(params, dt);

    NormalSource normal(seed);
    double q = std::sqrt(params.n_thermal + 0.5) * normal();

    const std::size_t stride = options.record_stride;
    for (long long k = 0;; ++k) {
        if (static_cast<std::size_t>(k) % stride == 0) record(k, q, 0.0);
        if (k >= idx.n_steps) break;
        const bool pump = k >= idx.pump_on;
        const bool probe = amp > 0.0 && k >= idx.probe_on && k < idx.probe_off;
        const double f = options.drift_enabled ? coeff[pump][probe](q) : 0.0;
        q += f * dt - sigma * normal();
        if (!std::isfinite(q)) {
            throw NumericalError("non-finite slow quadrature", static_cast<double>(k + 1) * dt);
        }
    }
}

template <typename Record>
void integrate(const PulseSchedule& schedule, const DeviceParams& params,
               const LangevinOptions& options, std::uint64_t seed, Record&& record) {
    if (options.model == LangevinModel::Full) {
        integrate_full(schedule, params, options, seed, record);
    } else {
        integrate_reduced(schedule, params, options, seed, record);
    }
}

std::size_t record_count(const PulseSchedule& schedule, const LangevinOptions& options) {
    const long long n_steps = std::llround(schedule.t_end / options.dt);
    return static_cast<std::size_t>(n_steps) / options.record_stride + 1;
}

std::vector<double> record_times(const PulseSchedule& schedule, const LangevinOptions& options) {
    std::vector<double> times(record_count(schedule, options));
    for (std::size_t i = 0; i < times.size(); ++i) {
        times[i] = static_cast<double>(i * options.record_stride) * options.dt;
    }
    return times;
}

void check_inputs(const PulseSchedule& schedule, const DeviceParams& params,
                  const LangevinOptions& options) {
    params.validate();
    schedule.validate();
    options.validate(params);
}

}  // namespace

void PulseSchedule::validate() const {
    probe.validate();
    if (!(pump_on_at >= 0.0) || !(pump_on_at <= probe.t_on) || !(probe.t_off <= t_end)) {
        throw std::invalid_argument(
            "pulse schedule requires 0 <= pump_on_at <= t_on < t_off <= t_end");
    }
}

void LangevinOptions::validate(const DeviceParams& params) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (record_stride == 0) throw std::invalid_argument("record stride must be at least 1");
    if (model == LangevinModel::Full && drift_enabled && !(dt < max_stable_dt(params))) {
        throw std::invalid_argument("dt exceeds the fast-quadrature stability bound");
    }
}

double max_stable_dt(const DeviceParams& params) {
    return 2.0 / (params.pump_amp + 0.5 * params.total_loss());
}

QuadratureDrift drift_full(double q, double p, const DeviceParams& params, double probe_amp,
                           double probe_phase) {
    return FullCoefficients(params, probe_amp, probe_phase)(q, p);
}

QuadratureState step(QuadratureState state, double dt, double z_q, double z_p,
                     const DeviceParams& params, double probe_amp, double probe_phase) {
    const QuadratureDrift f = drift_full(state.q, state.p, params, probe_amp, probe_phase);
    const double sigma = noise_amplitude(params, dt);
    QuadratureState next{state.q + f.dq_dt * dt - sigma * z_q, state.p + f.dp_dt * dt - sigma * z_p};
    if (!std::isfinite(next.q) || !std::isfinite(next.p)) {
        throw NumericalError("non-finite quadrature state");
    }
    return next;
}

Trajectory simulate_trajectory(const PulseSchedule& schedule, const DeviceParams& params,
                               const LangevinOptions& options, std::uint64_t seed) {
    LangevinOptions opts = options;
    opts.model = LangevinModel::Full;
    check_inputs(schedule, params, opts);
    Trajectory traj;
    traj.seed = seed;
    traj.times = record_times(schedule, opts);
    traj.q.reserve(traj.times.size());
    traj.p.reserve(traj.times.size());
    integrate_full(schedule, params, opts, seed, [&](long long, double q, double p) {
        traj.q.push_back(q);
        traj.p.push_back(p);
    });
    return traj;
}

Trajectory simulate_reduced(const PulseSchedule& schedule, const DeviceParams& params,
                            const LangevinOptions& options, std::uint64_t seed) {
    LangevinOptions opts = options;
    opts.model = LangevinModel::Reduced;
    check_inputs(schedule, params, opts);
    Trajectory traj;
    traj.seed = seed;
    traj.times = record_times(schedule, opts);
    traj.q.reserve(traj.times.size());
    integrate_reduced(schedule, params, opts, seed,
                      [&](long long, double q, double) { traj.q.push_back(q); });
    return traj;
}

std::size_t SwitchingSeries::index_at(double t) const {
    if (times.empty()) throw std::out_of_range("empty switching series");
    const double spacing = times.size() > 1 ? times[1] - times[0] : 1.0;
    const long long i = std::llround((t - times.front()) / spacing);
    if (i < 0 || i >= static_cast<long long>(times.size())) {
        throw std::out_of_range("time outside the recorded series");
    }
    return static_cast<std::size_t>(i);
}

std::vector<std::uint64_t> sequential_seeds(std::uint64_t base, std::size_t n) {
    std::vector<std::uint64_t> seeds(n);
    for (std::size_t i = 0; i < n; ++i) seeds[i] = trajectory_seed(base, i);
    return seeds;
}

SwitchingSeries run_ensemble(std::span<const std::uint64_t> seeds, const PulseSchedule& schedule,
                             const DeviceParams& params, const LangevinOptions& options,
                             double q_threshold) {
    check_inputs(schedule, params, options);
    if (seeds.empty()) throw std::invalid_argument("ensemble needs at least one trajectory");
    if (!(q_threshold > 0.0)) throw std::invalid_argument("threshold must be positive");

    SwitchingSeries out;
    out.times = record_times(schedule, options);
    out.n_runs = seeds.size();
    const std::size_t n_rec = out.times.size();
    const unsigned workers = resolve_workers(options.workers);
    std::vector<std::vector<std::size_t>> local(workers, std::vector<std::size_t>(n_rec, 0));

    parallel_for(seeds.size(), workers, [&](unsigned w, std::size_t i) {
        auto& counts = local[w];
        std::size_t r = 0;
        integrate(schedule, params, options, seeds[i], [&](long long, double q, double) {
            if (std::abs(q) > q_threshold) ++counts[r];
            ++r;
        });
    });

    out.switched.assign(n_rec, 0);
    for (const auto& counts : local) {
        for (std::size_t r = 0; r < n_rec; ++r) out.switched[r] += counts[r];
    }
    return out;
}

EnsembleMoments ensemble_moments(std::span<const std::uint64_t> seeds,
                                 const PulseSchedule& schedule, const DeviceParams& params,
                                 const LangevinOptions& options) {
    check_inputs(schedule, params, options);
    if (seeds.size() < 2) throw std::invalid_argument("moments need at least two trajectories");
    const std::size_t n_rec = record_count(schedule, options);
    // Per-trajectory Q samples, reduced deterministically in seed order afterwards.
    std::vector<std::vector<double>> paths(seeds.size());
    parallel_for(seeds.size(), options.workers, [&](unsigned, std::size_t i) {
        auto& path = paths[i];
        path.reserve(n_rec);
        integrate(schedule, params, options, seeds[i],
                  [&](long long, double q, double) { path.push_back(q); });
    });

    EnsembleMoments m;
    m.times = record_times(schedule, options);
    m.n_runs = seeds.size();
    m.mean.assign(n_rec, 0.0);
    m.variance.assign(n_rec, 0.0);
    m.displacement_variance.assign(n_rec, 0.0);
    const double n = static_cast<double>(seeds.size());
    for (std::size_t r = 0; r < n_rec; ++r) {
        double sum = 0.0, sum_d = 0.0;
        for (const auto& path : paths) {
            sum += path[r];
            sum_d += path[r] - path[0];
        }
        const double mean = sum / n;
        const double mean_d = sum_d / n;
        double ss = 0.0, ss_d = 0.0;
        for (const auto& path : paths) {
            ss += (path[r] - mean) * (path[r] - mean);
            const double d = path[r] - path[0] - mean_d;
            ss_d += d * d;
        }
        m.mean[r] = mean;
        m.variance[r] = ss / (n - 1.0);
        m.displacement_variance[r] = ss_d / (n - 1.0);
    }
    return m;
}

bool switch_indicator(const Trajectory& traj, double t, double q_threshold) {
    if (traj.times.empty()) throw std::out_of_range("empty trajectory");
    const double spacing = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0;
    const double lo = traj.times.front() - 0.5 * spacing;
    const double hi = traj.times.back() + 0.5 * spacing;
    if (!(t >= lo && t <= hi)) throw std::out_of_range("time outside the trajectory");
    std::size_t i = 0;
    if (spacing > 0.0) {
        i = static_cast<std::size_t>(std::llround((t - traj.times.front()) / spacing));
        i = std::min(i, traj.times.size() - 1);
    }
    return std::abs(traj.q[i]) > q_threshold;
}

std::optional<double> first_passage_time(const DeviceParams& params, double probe_amp,
                                         double probe_phase, double q0, double q_target, double dt,
                                         double t_max, std::uint64_t seed) {
    params.validate();
    if (!(q_target < q0)) throw std::invalid_argument("target must lie below the start point");
    if (!(dt > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("dt and t_max must be positive");
    const ReducedCoefficients drift(params, probe_amp, probe_phase);
    const double sigma = noise_amplitude(params, dt);
    const double var_step = sigma * sigma;
    NormalSource normal(seed);
    std::mt19937_64 uniform_engine(splitmix64(~seed));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const long long n_steps = std::llround(t_max / dt);
    double q = q0;
    for (long long k = 0; k < n_steps; ++k) {
        const double next = q + drift(q) * dt - sigma * normal();
        if (next <= q_target) return static_cast<double>(k + 1) * dt;
        // probability that the bridge between q and next dipped below the target
        const double cross = std::exp(-2.0 * (q - q_target) * (next - q_target) / var_step);
        if (uniform(uniform_engine) < cross) return (static_cast<double>(k) + 0.5) * dt;
        q = next;
    }
    return std::nullopt;
}

}  // namespace critsense

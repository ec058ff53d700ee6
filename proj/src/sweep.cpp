#include "critsense/sweep.hpp"

#include "critsense/analytic_ou.hpp"
#include "critsense/parallel.hpp"
#include "critsense/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace critsense {

std::vector<double> Range::values() const {
    std::vector<double> v(points);
    for (std::size_t i = 0; i < points; ++i) {
        v[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                           static_cast<double>(points - 1);
    }
    return v;
}

void Range::validate(std::string_view name) const {
    if (points == 0 || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
        throw std::invalid_argument(std::string(name) + ": range must be non-empty with lo <= hi");
    }
}

std::string_view to_string(SweepEngine engine) {
    switch (engine) {
        case SweepEngine::HeisenbergLangevin: return "hl";
        case SweepEngine::FokkerPlanck: return "fp";
        case SweepEngine::AnalyticOU: return "ou";
    }
    return "unknown";
}

SweepEngine parse_engine(std::string_view name) {
    if (name == "hl" || name == "heisenberg_langevin") return SweepEngine::HeisenbergLangevin;
    if (name == "fp" || name == "fokker_planck") return SweepEngine::FokkerPlanck;
    if (name == "ou" || name == "analytic_ou") return SweepEngine::AnalyticOU;
    throw std::invalid_argument("unknown engine '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
    alpha_over_kg.validate("alpha_over_kg");
    delta_mhz.validate("delta_mhz");
    if (phi) phi->validate("phi");
    if (engine == SweepEngine::HeisenbergLangevin && runs_per_cell == 0) {
        throw std::invalid_argument("runs_per_cell must be at least 1");
    }
    if (!(measure_at > 0.0)) throw std::invalid_argument("measure_at must be positive");
    if (!(q_threshold > 0.0)) throw std::invalid_argument("q_threshold must be positive");
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t i_alpha, std::size_t i_delta,
                        std::size_t i_phi, std::size_t run) {
    return hash_seed({base, i_alpha, i_delta, i_phi, run});
}

std::vector<std::uint64_t> cell_seeds(const SweepSpec& spec, std::size_t i_alpha,
                                      std::size_t i_delta, std::size_t i_phi) {
    std::vector<std::uint64_t> seeds(spec.runs_per_cell);
    for (std::size_t r = 0; r < seeds.size(); ++r) {
        seeds[r] = cell_seed(spec.base_seed, i_alpha, i_delta, i_phi, r);
    }
    return seeds;
}

namespace {

PulseSchedule dark(PulseSchedule s) {
    s.probe.amp = 0.0;
    return s;
}

/// The cell only needs the trajectory up to the measurement time.
PulseSchedule truncated(PulseSchedule s, double measure_at) {
    s.t_end = std::max(measure_at, s.probe.t_off);
    return s;
}

std::size_t count_switched(std::span<const std::uint64_t> seeds, const PulseSchedule& schedule,
                           const DeviceParams& params, const SweepSpec& spec) {
    LangevinOptions opt = spec.langevin;
    opt.workers = 1;
    const SwitchingSeries series = run_ensemble(seeds, schedule, params, opt, spec.q_threshold);
    return series.switched[series.index_at(spec.measure_at)];
}

double deterministic_probability(const PulseSchedule& schedule, const DeviceParams& params,
                                 const SweepSpec& spec) {
    if (spec.engine == SweepEngine::AnalyticOU) {
        DeviceParams kerr_free = params;
        kerr_free.kerr = 0.0;
        return ou_switching_probability(spec.measure_at, spec.q_threshold, kerr_free, schedule);
    }
    FokkerPlanckRun run;
    run.grid = default_grid(params, spec.fp_points);
    run.options = spec.fokker_planck;
    const double t[] = {spec.measure_at};
    return run_fp(schedule, params, spec.q_threshold, t, run).probability.front();
}

void apply_mask(SweepRow& row, std::size_t runs_per_cell) {
    const double level = 1.0 - 0.5 / static_cast<double>(std::max<std::size_t>(runs_per_cell, 1));
    if (row.stats.p1plus_raw >= level || row.stats.saturated) {
        row.masked = true;
        row.stats.saturated = true;
        row.stats.eta = std::numeric_limits<double>::quiet_NaN();
    }
}

SweepRow evaluate_cell(const SweepSpec& spec, const DeviceParams& params,
                       const PulseSchedule& schedule, std::size_t ia, std::size_t id,
                       std::size_t iphi) {
    SweepRow row;
    row.i_alpha = ia;
    row.i_delta = id;
    row.i_phi = iphi;
    row.alpha_over_kg = params.pump_amp / params.total_loss();
    row.delta_over_kg = params.detuning / params.total_loss();
    row.phi = schedule.probe.phase;
    const double n_bar = mean_photons(schedule.probe);
    try {
        params.validate();
        const PulseSchedule probe = truncated(schedule, spec.measure_at);
        if (spec.engine == SweepEngine::HeisenbergLangevin) {
            const auto seeds = cell_seeds(spec, ia, id, iphi);
            const std::size_t n_dark = count_switched(seeds, dark(probe), params, spec);
            const std::size_t n_probe = count_switched(seeds, probe, params, spec);
            row.stats = switching_stats(spec.measure_at, n_dark, n_probe, seeds.size(), n_bar);
        } else {
            const double pd = deterministic_probability(dark(probe), params, spec);
            const double pp = deterministic_probability(probe, params, spec);
            row.stats = switching_stats_exact(spec.measure_at, pd, pp, n_bar);
        }
        apply_mask(row, spec.runs_per_cell);
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
        row.stats.p_dark = row.stats.p1plus_raw = row.stats.p1plus_corrected = row.stats.eta =
            std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const DeviceParams& base,
                      const PulseSchedule& schedule) {
    spec.validate();
    schedule.validate();
    const auto alphas = spec.alpha_over_kg.values();
    const auto deltas = spec.delta_mhz.values();
    const auto phis = spec.phi ? spec.phi->values() : std::vector<double>{schedule.probe.phase};
    const double kg = base.total_loss();

    SweepResult out;
    out.rows.resize(alphas.size() * deltas.size() * phis.size());
    parallel_for(out.rows.size(), spec.workers, [&](unsigned, std::size_t index) {
        const std::size_t iphi = index % phis.size();
        const std::size_t id = (index / phis.size()) % deltas.size();
        const std::size_t ia = index / (phis.size() * deltas.size());
        DeviceParams p = base;
        p.pump_amp = alphas[ia] * kg;
        p.detuning = units::mhz_to_rad(deltas[id]);
        PulseSchedule s = schedule;
        s.probe.phase = phis[iphi];
        out.rows[index] = evaluate_cell(spec, p, s, ia, id, iphi);
    });
    for (const auto& row : out.rows) out.n_failed += row.failed ? 1 : 0;
    for (double d : deltas) {
        DeviceParams p = base;
        p.detuning = units::mhz_to_rad(d);
        out.critical_line.push_back({p.detuning / kg, alpha_critical(p) / kg});
    }
    return out;
}

PhaseSweepResult phase_sweep(const std::vector<double>& phis, const SweepSpec& spec,
                             const DeviceParams& params, const PulseSchedule& schedule) {
    spec.validate();
    schedule.validate();
    params.validate();
    if (phis.empty()) throw std::invalid_argument("phase sweep needs at least one phase");
    const double n_bar = mean_photons(schedule.probe);
    const PulseSchedule probe = truncated(schedule, spec.measure_at);

    PhaseSweepResult out;
    out.rows.resize(phis.size());
    out.switched.assign(phis.size(), 0);
    const bool stochastic = spec.engine == SweepEngine::HeisenbergLangevin;
    double p_dark = 0.0;
    if (stochastic) {
        const auto seeds = cell_seeds(spec, 0, 0, phis.size());
        out.dark_switched = count_switched(seeds, dark(probe), params, spec);
        p_dark = static_cast<double>(out.dark_switched) / static_cast<double>(seeds.size());
        out.dark = switching_stats(spec.measure_at, out.dark_switched, out.dark_switched,
                                   seeds.size(), n_bar);
    } else {
        p_dark = deterministic_probability(dark(probe), params, spec);
        out.dark = switching_stats_exact(spec.measure_at, p_dark, p_dark, n_bar);
    }

    parallel_for(phis.size(), spec.workers, [&](unsigned, std::size_t i) {
        PulseSchedule s = probe;
        s.probe.phase = phis[i];
        SweepRow& row = out.rows[i];
        row.i_phi = i;
        row.alpha_over_kg = params.pump_amp / params.total_loss();
        row.delta_over_kg = params.detuning / params.total_loss();
        row.phi = phis[i];
        if (stochastic) {
            const auto seeds = cell_seeds(spec, 0, 0, i);
            out.switched[i] = count_switched(seeds, s, params, spec);
            row.stats = switching_stats(spec.measure_at, out.dark_switched, out.switched[i],
                                        seeds.size(), n_bar);
        } else {
            row.stats = switching_stats_exact(spec.measure_at, p_dark,
                                              deterministic_probability(s, params, spec), n_bar);
        }
        apply_mask(row, spec.runs_per_cell);
    });
    return out;
}

}  // namespace critsense

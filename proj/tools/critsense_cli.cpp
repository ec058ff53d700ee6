// critsense: command-line front end. Each subcommand writes CSV files and a
// manifest.json into the output directory.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 sweep finished with failed cells.

#include "critsense/analytic_ou.hpp"
#include "critsense/config.hpp"
#include "critsense/csv.hpp"
#include "critsense/errors.hpp"
#include "critsense/fokker_planck.hpp"
#include "critsense/langevin.hpp"
#include "critsense/metrics.hpp"
#include "critsense/potential.hpp"
#include "critsense/rng.hpp"
#include "critsense/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace critsense;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPartial = 4;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CommonArgs {
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    std::optional<std::string> out_dir;
    bool plot_script = false;
};

// Collects outputs and writes the manifest on completion.
class RunContext {
public:
    RunContext(std::string command, RunConfig config)
        : command_(std::move(command)), config_(std::move(config)),
          start_(std::chrono::steady_clock::now()) {
        fs::create_directories(config_.output.out_dir);
    }

    [[nodiscard]] const RunConfig& config() const { return config_; }

    std::string path(const std::string& file) {
        outputs_.push_back(file);
        return (fs::path(config_.output.out_dir) / file).string();
    }

    json& extra() { return extra_; }

    void finish(const std::string& status) {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json m{
            {"command", command_},
            {"version", kVersion},
            {"config", to_json(config_)},
            {"seeds",
             {{"base_seed", config_.engine.base_seed},
              {"trajectory_seed", "base_seed xor run_index"},
              {"sweep_cell_seed", "hash(base_seed, i_alpha, i_delta, i_phi, run_index)"}}},
            {"wall_time_s", wall},
            {"status", status},
            {"outputs", outputs_},
        };
        if (!extra_.is_null()) m["results"] = extra_;
        std::ofstream out(fs::path(config_.output.out_dir) / "manifest.json");
        out << m.dump(2) << '\n';
        if (config_.output.plot_script) write_plot_script();
    }

private:
    void write_plot_script() {
        std::ofstream out(fs::path(config_.output.out_dir) / "plot.py");
        out << "# Generic plot of every CSV in this directory: first column against the rest.\n"
               "import glob, os\n"
               "import pandas as pd\n"
               "import matplotlib\n"
               "matplotlib.use('Agg')\n"
               "import matplotlib.pyplot as plt\n"
               "here = os.path.dirname(os.path.abspath(__file__))\n"
               "for path in sorted(glob.glob(os.path.join(here, '*.csv'))):\n"
               "    df = pd.read_csv(path)\n"
               "    numeric = df.select_dtypes('number')\n"
               "    if numeric.shape[1] < 2:\n"
               "        continue\n"
               "    x = numeric.columns[0]\n"
               "    ax = numeric.plot(x=x, marker='.', linestyle='-', figsize=(7, 4))\n"
               "    ax.set_title(os.path.basename(path))\n"
               "    plt.tight_layout()\n"
               "    plt.savefig(path[:-4] + '.png', dpi=120)\n"
               "    plt.close()\n";
    }

    std::string command_;
    RunConfig config_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
    json extra_;
};

RunConfig resolve(const CommonArgs& args) {
    std::vector<std::string> overrides = args.overrides;
    if (args.out_dir) overrides.push_back("output.out_dir=\"" + *args.out_dir + "\"");
    if (args.plot_script) overrides.emplace_back("output.plot_script=true");
    return load_config(args.config_path, overrides);
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "JSON run configuration");
    cmd->add_option("--set", args.overrides, "override, e.g. --set engine.n_runs=500")
        ->allow_extra_args(false);
    cmd->add_option("-o,--out", args.out_dir, "output directory (output.out_dir)");
    cmd->add_flag("--plot-script", args.plot_script, "also write plot.py next to the CSVs");
}

double over_kg(double rate, const DeviceParams& p) { return rate / p.total_loss(); }

std::vector<double> output_times(const RunConfig& c, const PulseSchedule& s) {
    std::vector<double> t = time_grid(0.0, s.t_end, units::us_to_s(c.engine.output_step_us));
    // always report the probe falling edge
    t.push_back(s.probe.t_off);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            t.end());
    return t;
}

PulseSchedule dark_of(PulseSchedule s) {
    s.probe.amp = 0.0;
    return s;
}

// phase-diagram -------------------------------------------------------------

struct PhaseDiagramArgs {
    double alpha_lo = 0.0, alpha_hi = 1.0;
    std::size_t alpha_points = 101;
    double delta_lo = -0.6, delta_hi = 0.6;
    std::size_t delta_points = 121;
};

int cmd_phase_diagram(const CommonArgs& args, const PhaseDiagramArgs& pd) {
    RunContext ctx("phase-diagram", resolve(args));
    const DeviceParams base = device_params(ctx.config());
    const auto alphas = Range{pd.alpha_lo, pd.alpha_hi, pd.alpha_points}.values();
    const auto deltas = Range{pd.delta_lo, pd.delta_hi, pd.delta_points}.values();
    const double kg = base.total_loss();

    CsvWriter grid(ctx.path("phase_diagram.csv"), {"alpha_over_kg", "delta_over_kg", "region",
                                                   "q_max", "q_min", "u_max_over_kg"});
    for (double a : alphas) {
        for (double d : deltas) {
            DeviceParams p = base;
            p.pump_amp = a * kg;
            p.detuning = d * kg;
            const PotentialExtrema ex = extrema(p);
            grid.row({a, d, to_string(ex.region), ex.q_max.value_or(kNaN), ex.q_min.value_or(kNaN),
                      ex.u_at_max ? *ex.u_at_max / kg : kNaN});
        }
    }
    CsvWriter line(ctx.path("critical_line.csv"),
                   {"delta_over_kg", "alpha_c_over_kg", "alpha_first_order_over_kg"});
    for (double d : deltas) {
        DeviceParams p = base;
        p.detuning = d * kg;
        const double first = (d > 0.0 && p.kerr < 0.0)
                                 ? first_order_line(p.detuning, p).alpha_cross / kg
                                 : kNaN;
        line.row({d, alpha_critical(p) / kg, first});
    }
    ctx.finish("complete");
    return 0;
}

// potential -----------------------------------------------------------------

const std::vector<std::pair<double, double>> kTablePoints{
    {0.445, -0.408}, {0.496, 0.297}, {0.623, 0.0},   {0.506, 0.111},
    {0.556, 0.408},  {0.572, 0.556}, {0.519, 0.445}, {0.594, -0.371},
};

int cmd_potential(const CommonArgs& args, const std::vector<std::string>& points,
                  double q_span, std::size_t curve_points) {
    RunContext ctx("potential", resolve(args));
    const RunConfig& c = ctx.config();
    const DeviceParams dev = device_params(c);
    const double kg = dev.total_loss();

    std::vector<std::pair<double, double>> rows = kTablePoints;
    if (!points.empty()) {
        rows.clear();
        for (const auto& s : points) {
            std::istringstream in(s);
            double a = 0.0, d = 0.0;
            char comma = 0;
            if (!(in >> a >> comma >> d) || comma != ',') {
                throw ConfigError("--point", "expected alpha_over_kg,delta_over_kg, got '" + s + "'");
            }
            rows.emplace_back(a, d);
        }
    }
    CsvWriter table(ctx.path("potential_table.csv"),
                    {"point", "alpha_over_kg", "delta_over_kg", "region", "q_max",
                     "u_max_over_kg", "q_min", "u_min_over_kg"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        DeviceParams p = dev;
        p.pump_amp = rows[i].first * kg;
        p.detuning = rows[i].second * kg;
        const PotentialExtrema ex = extrema(p);
        table.row({i + 1, rows[i].first, rows[i].second, to_string(ex.region),
                   ex.q_max.value_or(kNaN), ex.u_at_max ? *ex.u_at_max / kg : kNaN,
                   ex.q_min.value_or(kNaN), ex.u_at_min ? *ex.u_at_min / kg : kNaN});
        std::cout << "point " << i + 1 << ": region " << to_string(ex.region) << ", Q_max "
                  << (ex.q_max ? format_double(*ex.q_max) : "N/A") << ", U(Q_max)/(k+g) "
                  << (ex.u_at_max ? format_double(*ex.u_at_max / kg) : "N/A") << '\n';
    }

    const PulseSchedule s = pulse_schedule(c);
    CsvWriter curve(ctx.path("potential_curve.csv"), {"q", "u_over_kg", "u_tilted_over_kg"});
    for (double q : Range{-q_span, q_span, curve_points}.values()) {
        curve.row({q, potential_value(q, dev) / kg,
                   potential_value(q, dev, s.probe.amp, s.probe.phase) / kg});
    }
    ctx.finish("complete");
    return 0;
}

// simulate-hl ---------------------------------------------------------------

int cmd_simulate_hl(const CommonArgs& args, std::size_t dump_trajectories) {
    RunContext ctx("simulate-hl", resolve(args));
    const RunConfig& c = ctx.config();
    const DeviceParams p = device_params(c);
    const PulseSchedule s = pulse_schedule(c);
    const LangevinOptions opt = langevin_options(c);
    const auto seeds = sequential_seeds(c.engine.base_seed, c.engine.n_runs);
    const double q_th = c.engine.q_threshold;

    const SwitchingSeries dark = run_ensemble(seeds, dark_of(s), p, opt, q_th);
    const SwitchingSeries probe = run_ensemble(seeds, s, p, opt, q_th);
    CsvWriter out(ctx.path("hl_switching.csv"),
                  {"t_seconds", "p_dark", "p1plus_raw", "ci_low", "ci_high", "n_runs"});
    for (std::size_t i = 0; i < probe.times.size(); ++i) {
        const Interval ci = binomial_ci(probe.switched[i], probe.n_runs);
        out.row({probe.times[i], dark.probability(i), probe.probability(i), ci.low, ci.high,
                 probe.n_runs});
    }
    for (std::size_t r = 0; r < std::min(dump_trajectories, seeds.size()); ++r) {
        const Trajectory t = opt.model == LangevinModel::Full
                                 ? simulate_trajectory(s, p, opt, seeds[r])
                                 : simulate_reduced(s, p, opt, seeds[r]);
        CsvWriter traj(ctx.path("hl_trajectory_" + std::to_string(r) + ".csv"),
                       {"t_seconds", "q", "p"});
        for (std::size_t k = 0; k < t.size(); ++k) {
            traj.row({t.times[k], t.q[k], t.p.empty() ? kNaN : t.p[k]});
        }
    }
    const std::size_t k = probe.index_at(s.probe.t_off);
    const SwitchingStats st = switching_stats(probe.times[k], dark.switched[k], probe.switched[k],
                                              probe.n_runs, mean_photons(s.probe));
    ctx.extra() = {{"at_probe_off",
                    {{"time_us", units::s_to_us(st.time)},
                     {"p_dark", st.p_dark},
                     {"p1plus", st.p1plus_raw},
                     {"p1plus_corrected", st.p1plus_corrected},
                     {"eta", st.saturated ? json(nullptr) : json(st.eta)}}}};
    ctx.finish("complete");
    return 0;
}

// simulate-fp ---------------------------------------------------------------

json fit_json(const RateFit& f) {
    static const char* names[] = {"ok", "non_monotone", "saturated", "too_few_points"};
    return {{"rate_per_us", f.rate * 1e-6},
            {"residual", f.residual},
            {"status", names[static_cast<int>(f.status)]}};
}

int cmd_simulate_fp(const CommonArgs& args, const std::vector<double>& snapshots_us) {
    RunContext ctx("simulate-fp", resolve(args));
    const RunConfig& c = ctx.config();
    const DeviceParams p = device_params(c);
    const PulseSchedule s = pulse_schedule(c);
    const FokkerPlanckRun run = fokker_planck_run(c, p);
    const auto times = output_times(c, s);
    const double q_th = c.engine.q_threshold;

    const ProbabilitySeries dark = run_fp(dark_of(s), p, q_th, times, run);
    const ProbabilitySeries probe = run_fp(s, p, q_th, times, run);
    CsvWriter out_dark(ctx.path("fp_dark.csv"), {"t_seconds", "probability"});
    CsvWriter out_probe(ctx.path("fp_probe.csv"), {"t_seconds", "probability"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        out_dark.row({times[i], dark.probability[i]});
        out_probe.row({times[i], probe.probability[i]});
    }
    for (double t_us : snapshots_us) {
        const double t = units::us_to_s(t_us);
        if (!(t >= 0.0) || t > s.t_end) {
            throw ConfigError("--snapshot-us", "time outside [0, schedule.t_end_us]");
        }
        const DensityGrid w =
            evolve(init_density(run.initial, run.grid, p.n_thermal), p, s, t, run.options);
        CsvWriter snap(ctx.path("fp_density_" + format_double(t_us) + "us.csv"), {"q", "w"});
        for (std::size_t i = 0; i < w.q_values.size(); ++i) snap.row({w.q_values[i], w.weights[i]});
    }
    const RateFit fb = fit_rates(probe.times, probe.probability, s.probe.t_on, s.probe.t_on,
                                 s.probe.t_off);
    const RateFit fd = fit_rates(dark.times, dark.probability, s.probe.t_on, s.probe.t_on,
                                 s.probe.t_off);
    const auto at = std::lower_bound(times.begin(), times.end(), s.probe.t_off - 1e-12);
    const std::size_t k = static_cast<std::size_t>(at - times.begin());
    const SwitchingStats st = switching_stats_exact(times[k], dark.probability[k],
                                                    probe.probability[k], mean_photons(s.probe));
    ctx.extra() = {
        {"grid", {{"q_cap", run.grid.q_cap}, {"n_points", run.grid.n_points}}},
        {"at_probe_off",
         {{"p_dark", st.p_dark},
          {"p1plus", st.p1plus_raw},
          {"p1plus_corrected", st.p1plus_corrected},
          {"eta", st.saturated ? json(nullptr) : json(st.eta)}}},
        {"rate_fit_probe", fit_json(fb)},
        {"rate_fit_dark", fit_json(fd)},
        {"clipped_steps", probe.stats.clipped_steps + dark.stats.clipped_steps},
        {"max_mass_error", std::max(probe.stats.max_mass_error, dark.stats.max_mass_error)},
    };
    if (fb.ok() && fd.ok() && s.probe.amp > 0.0) {
        ctx.extra()["rate_efficiency"] = rate_efficiency(fb.rate, fd.rate, s.probe.amp);
    }
    ctx.finish("complete");
    return 0;
}

// analytic-ou ---------------------------------------------------------------

int cmd_analytic_ou(const CommonArgs& args, bool critical) {
    RunContext ctx("analytic-ou", resolve(args));
    const RunConfig& c = ctx.config();
    DeviceParams p = device_params(c);
    p.kerr = 0.0;
    const PulseSchedule s = pulse_schedule(c);
    const auto times = output_times(c, s);
    const double q_th = c.engine.q_threshold;

    CsvWriter out(ctx.path("analytic_ou.csv"),
                  {"t_seconds", "mean", "variance", "p_dark", "p1plus_raw"});
    if (critical) {
        // s = 0 with the tilt always on, started from a point at the origin
        OuParams ou;
        ou.d = diffusion_constant(p);
        ou.force = tilt_force(p, s.probe.amp, s.probe.phase);
        OuParams ou_dark = ou;
        ou_dark.force = 0.0;
        for (double t : times) {
            out.row({t, ou_mean(t, ou), ou_variance(t, ou),
                     t > 0.0 ? ou_probabilities(t, q_th, ou_dark) : 0.0,
                     t > 0.0 ? ou_probabilities(t, q_th, ou) : 0.0});
        }
        if (ou.force > 0.0) {
            const FirstPassage fp = first_passage(-q_th, ou);
            ctx.extra() = {{"first_passage_mean_us", fp.mean * 1e6},
                           {"first_passage_std_us", std::sqrt(fp.variance) * 1e6}};
        }
    } else {
        for (double t : times) {
            const OuMoments m = ou_propagate(t, p, s);
            out.row({t, m.mean, m.variance,
                     ou_switching_probability(t, q_th, p, dark_of(s)),
                     ou_switching_probability(t, q_th, p, s)});
        }
        const double sc = curvature_s(p);
        ctx.extra() = {{"s_over_2pi_khz", units::rad_to_khz(sc)},
                       {"d_over_2pi_mhz", units::rad_to_mhz(diffusion_constant(p))},
                       {"d_over_s", sc > 0.0 ? json(diffusion_constant(p) / sc) : json(nullptr)}};
    }
    ctx.finish("complete");
    return 0;
}

// sweep / phase-sweep -------------------------------------------------------

const std::vector<std::string> kMetricsColumns{
    "alpha_over_kg", "delta_over_kg", "p_dark", "p1plus_raw", "p1plus_corrected",
    "eta",           "ci_low",        "ci_high"};

int cmd_sweep(const CommonArgs& args) {
    RunContext ctx("sweep", resolve(args));
    const RunConfig& c = ctx.config();
    const SweepSpec spec = sweep_spec(c);
    const SweepResult res = run_sweep(spec, device_params(c), pulse_schedule(c));

    std::vector<std::string> cols = kMetricsColumns;
    for (const char* extra : {"phi_rad", "masked", "failed", "error"}) cols.emplace_back(extra);
    CsvWriter out(ctx.path("sweep.csv"), cols);
    for (const auto& r : res.rows) {
        out.row({r.alpha_over_kg, r.delta_over_kg, r.stats.p_dark, r.stats.p1plus_raw,
                 r.stats.p1plus_corrected, r.stats.eta, r.stats.ci.low, r.stats.ci.high, r.phi,
                 r.masked, r.failed, r.error});
    }
    CsvWriter line(ctx.path("critical_line.csv"), {"delta_over_kg", "alpha_c_over_kg"});
    for (const auto& pt : res.critical_line) line.row({pt.delta_over_kg, pt.alpha_over_kg});
    ctx.extra() = {{"cells", res.rows.size()}, {"failed_cells", res.n_failed},
                   {"engine", to_string(spec.engine)}};
    if (res.n_failed > 0) {
        ctx.finish("incomplete");
        std::cerr << res.n_failed << " sweep cell(s) failed; see sweep.csv\n";
        return kExitPartial;
    }
    ctx.finish("complete");
    return 0;
}

int cmd_phase_sweep(const CommonArgs& args) {
    RunContext ctx("phase-sweep", resolve(args));
    const RunConfig& c = ctx.config();
    SweepSpec spec = sweep_spec(c);
    std::vector<double> phis;
    if (spec.phi) {
        phis = spec.phi->values();
    } else {
        // 32 phases over one full turn, endpoint excluded
        for (int i = 0; i < 32; ++i) phis.push_back(2.0 * std::numbers::pi * i / 32.0);
    }
    const PhaseSweepResult res = phase_sweep(phis, spec, device_params(c), pulse_schedule(c));
    CsvWriter out(ctx.path("phase_sweep.csv"), {"phi_rad", "p1plus_raw", "p1plus_corrected",
                                               "ci_low", "ci_high", "p_dark"});
    for (const auto& r : res.rows) {
        out.row({r.phi, r.stats.p1plus_raw, r.stats.p1plus_corrected, r.stats.ci.low,
                 r.stats.ci.high, r.stats.p_dark});
    }
    ctx.extra() = {{"p_dark", res.dark.p_dark}, {"engine", to_string(spec.engine)}};
    ctx.finish("complete");
    return 0;
}

// metrics -------------------------------------------------------------------

int cmd_metrics(const CommonArgs& args, std::optional<double> p1plus, std::optional<double> p_dark,
                std::optional<double> n_bar) {
    RunContext ctx("metrics", resolve(args));
    const RunConfig& c = ctx.config();
    const DeviceParams p = device_params(c);
    const PulseSchedule s = pulse_schedule(c);
    if (p1plus.has_value() != p_dark.has_value()) {
        throw ConfigError("--p1plus", "give both --p1plus and --p-dark, or neither");
    }
    const double nb = n_bar.value_or(mean_photons(s.probe));
    if (!p1plus) {
        const FokkerPlanckRun run = fokker_planck_run(c, p);
        const double t[] = {s.probe.t_off};
        p_dark = run_fp(dark_of(s), p, c.engine.q_threshold, t, run).probability[0];
        p1plus = run_fp(s, p, c.engine.q_threshold, t, run).probability[0];
    }
    const SwitchingStats st = switching_stats_exact(s.probe.t_off, *p_dark, *p1plus, nb);
    CsvWriter out(ctx.path("metrics.csv"), kMetricsColumns);
    out.row({over_kg(p.pump_amp, p), over_kg(p.detuning, p), st.p_dark, st.p1plus_raw,
             st.p1plus_corrected, st.eta, st.ci.low, st.ci.high});
    std::cout << "p_dark " << format_double(st.p_dark) << "  P1+ " << format_double(st.p1plus_raw)
              << "  p1+ " << format_double(st.p1plus_corrected) << "  eta "
              << format_double(st.eta) << '\n';
    ctx.extra() = {{"n_bar", nb}, {"corrected_negative", st.corrected_negative}};
    ctx.finish("complete");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kerr parametric resonator photon-detector simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonArgs common;

    auto* pd_cmd = app.add_subcommand("phase-diagram", "classify the (alpha, Delta) plane");
    add_common(pd_cmd, common);
    PhaseDiagramArgs pd;
    pd_cmd->add_option("--alpha-lo", pd.alpha_lo);
    pd_cmd->add_option("--alpha-hi", pd.alpha_hi);
    pd_cmd->add_option("--alpha-points", pd.alpha_points);
    pd_cmd->add_option("--delta-lo", pd.delta_lo, "Delta/(kappa+gamma)");
    pd_cmd->add_option("--delta-hi", pd.delta_hi);
    pd_cmd->add_option("--delta-points", pd.delta_points);

    auto* pot_cmd = app.add_subcommand("potential", "potential extrema table and curve");
    add_common(pot_cmd, common);
    std::vector<std::string> points;
    double q_span = 50.0;
    std::size_t curve_points = 1001;
    pot_cmd->add_option("--point", points, "alpha_over_kg,delta_over_kg (repeatable)");
    pot_cmd->add_option("--q-span", q_span, "curve covers [-q, q]");
    pot_cmd->add_option("--curve-points", curve_points);

    auto* hl_cmd = app.add_subcommand("simulate-hl", "Langevin ensemble switching curves");
    add_common(hl_cmd, common);
    std::size_t dump = 0;
    hl_cmd->add_option("--trajectories", dump, "also write the first N trajectories");

    auto* fp_cmd = app.add_subcommand("simulate-fp", "Fokker-Planck switching curves");
    add_common(fp_cmd, common);
    std::vector<double> snapshots_us;
    fp_cmd->add_option("--snapshot-us", snapshots_us, "write the probe-run density at these times");

    auto* ou_cmd = app.add_subcommand("analytic-ou", "closed-form Kerr-free moments");
    add_common(ou_cmd, common);
    bool critical = false;
    ou_cmd->add_flag("--critical", critical, "use s = 0 (Fick's law) instead of the device curvature");

    auto* sw_cmd = app.add_subcommand("sweep", "switching and efficiency maps");
    add_common(sw_cmd, common);

    auto* ps_cmd = app.add_subcommand("phase-sweep", "switching against the probe phase");
    add_common(ps_cmd, common);

    auto* m_cmd = app.add_subcommand("metrics", "detector efficiency from probabilities");
    add_common(m_cmd, common);
    std::optional<double> p1plus, p_dark, n_bar;
    m_cmd->add_option("--p1plus", p1plus);
    m_cmd->add_option("--p-dark", p_dark);
    m_cmd->add_option("--n-bar", n_bar);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*pd_cmd) return cmd_phase_diagram(common, pd);
        if (*pot_cmd) return cmd_potential(common, points, q_span, curve_points);
        if (*hl_cmd) return cmd_simulate_hl(common, dump);
        if (*fp_cmd) return cmd_simulate_fp(common, snapshots_us);
        if (*ou_cmd) return cmd_analytic_ou(common, critical);
        if (*sw_cmd) return cmd_sweep(common);
        if (*ps_cmd) return cmd_phase_sweep(common);
        if (*m_cmd) return cmd_metrics(common, p1plus, p_dark, n_bar);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

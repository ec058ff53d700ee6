#include "critsense/analytic_ou.hpp"
#include "critsense/errors.hpp"
#include "critsense/fokker_planck.hpp"
#include "critsense/potential.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace critsense;
using doctest::Approx;

namespace {

DeviceParams point4() { return reference_device(0.506, 0.111); }

PulseSchedule probe_schedule() {
    PulseSchedule s;
    s.probe.amp = 1e3;
    return s;
}

PulseSchedule dark_schedule() {
    PulseSchedule s;
    s.probe.amp = 0.0;
    return s;
}

}  // namespace

TEST_CASE("initial densities") {
    const GridSpec grid{20.0, 2001};
    const DensityGrid th = init_density(InitialDensity::thermal(), grid);
    CHECK(total_mass(th) == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(density_mean(th)) < 1e-12);
    CHECK(density_variance(th) == Approx(0.5).epsilon(1e-6));
    CHECK(density_variance(init_density(InitialDensity::thermal(), grid, 1.0)) ==
          Approx(1.5).epsilon(1e-6));

    const DensityGrid g = init_density(InitialDensity::gaussian(0.0, 1.0), grid);
    CHECK(std::abs(total_mass(g) - 1.0) < 1e-8);
    CHECK(density_variance(g) == Approx(1.0).epsilon(1e-6));

    const DensityGrid d = init_density(InitialDensity::delta_at(3.0), grid);
    CHECK(std::abs(density_mean(d) - 3.0) < grid.spacing());
    CHECK(std::sqrt(density_variance(d)) == Approx(2 * grid.spacing()).epsilon(1e-3));

    CHECK_THROWS_AS((void)init_density(InitialDensity::delta_at(25.0), grid), std::invalid_argument);
    CHECK_THROWS_AS((void)init_density(InitialDensity::gaussian(0.0, 0.0), grid),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)init_density(InitialDensity::thermal(), GridSpec{1.0, 2}),
                    std::invalid_argument);
}

TEST_CASE("default grid covers the outer wells") {
    const DeviceParams p = point4();
    const GridSpec g = default_grid(p);
    CHECK(g.n_points == 4096);
    CHECK(g.q_cap >= 1.5 * *extrema(p).q_min);
    CHECK(g.q_cap >= 10 * std::sqrt(diffusion_constant(p) / curvature_s(p)));
    // resolves the thermal width
    CHECK(g.spacing() <= std::sqrt(0.5) / 5);

    DeviceParams crit = p;
    crit.kerr = 0.0;
    crit.pump_amp = alpha_critical(p);
    const double floor = 1e-3 * p.total_loss();
    CHECK(default_grid(crit).q_cap == Approx(10 * std::sqrt(diffusion_constant(p) / floor)));
}

TEST_CASE("probability outside a threshold") {
    const GridSpec grid{30.0, 6001};
    const double sigma = 2.0;
    const DensityGrid g = init_density(InitialDensity::gaussian(0.0, sigma), grid);
    for (double th : {0.5, 2.0, 4.0, 7.0}) {
        CHECK(probability_outside(g, th) ==
              Approx(std::erfc(th / (std::numbers::sqrt2 * sigma))).epsilon(1e-6));
    }
    CHECK(probability_outside(g, 1e-9) == Approx(1.0).epsilon(1e-8));
    CHECK(probability_outside(g, 29.99) < 1e-12);
    // continuous in the threshold across cell edges
    const double h = grid.spacing();
    CHECK(std::abs(probability_outside(g, 3.0 - 1e-9) - probability_outside(g, 3.0 + 1e-9)) < 1e-8);
    CHECK(probability_outside(g, 3.0 + 0.3 * h) < probability_outside(g, 3.0));
    CHECK_THROWS_AS((void)probability_outside(g, 31.0), std::invalid_argument);
    CHECK_THROWS_AS((void)probability_outside(g, 0.0), std::invalid_argument);
}

TEST_CASE("free diffusion from a point") {
    DeviceParams p = point4();
    p.kerr = 0.0;
    p.pump_amp = alpha_critical(p);
    REQUIRE(std::abs(curvature_s(p)) < 1e-6 * p.total_loss());
    const GridSpec grid = default_grid(p);
    DensityGrid w = init_density(InitialDensity::delta_at(0.0), grid);
    const double var0 = density_variance(w);
    EvolveStats stats;
    w = evolve(w, p, dark_schedule(), 1e-6, {}, &stats);
    const double expected = 2 * diffusion_constant(p) * 1e-6 + var0;
    CHECK(density_variance(w) == Approx(expected).epsilon(5e-3));
    CHECK(std::abs(density_mean(w)) < 1e-9);
    CHECK(std::abs(total_mass(w) - 1.0) < 1e-10);
    CHECK(stats.steps == 500);
    CHECK(w.time == 1e-6);
}

TEST_CASE("Kerr-free evolution tracks the OU moments") {
    DeviceParams p = point4();
    p.kerr = 0.0;
    const PulseSchedule s = probe_schedule();
    const GridSpec grid = default_grid(p);
    DensityGrid w = init_density(InitialDensity::thermal(), grid);
    FokkerPlanckOptions opt;
    for (double t : time_grid(0.2e-6, 4e-6, 0.2e-6)) {
        w = evolve(w, p, s, t, opt);
        const OuMoments ou = ou_propagate(t, p, s);
        CAPTURE(t);
        CHECK(std::abs(density_mean(w) - ou.mean) <=
              1e-3 * std::max(std::abs(ou.mean), std::sqrt(ou.variance)));
        CHECK(density_variance(w) == Approx(ou.variance).epsilon(1e-3));
    }
}

TEST_CASE("stationary Kerr-free density has variance D/s") {
    DeviceParams p = point4();
    p.kerr = 0.0;
    DensityGrid w = init_density(InitialDensity::thermal(), default_grid(p));
    FokkerPlanckOptions opt;
    opt.dt = 10e-9;
    w = evolve(w, p, dark_schedule(), 30e-6, opt);
    CHECK(density_variance(w) == Approx(diffusion_constant(p) / curvature_s(p)).epsilon(1e-3));
}

TEST_CASE("mass, symmetry and positivity at the operating point") {
    const DeviceParams p = point4();
    const GridSpec grid = default_grid(p);
    DensityGrid w = init_density(InitialDensity::thermal(), grid);
    EvolveStats stats;
    w = evolve(w, p, dark_schedule(), 4e-6, {}, &stats);
    CHECK(stats.max_mass_error < 1e-6);
    const std::size_t n = w.weights.size();
    double asym = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        asym = std::max(asym, std::abs(w.weights[i] - w.weights[n - 1 - i]));
        peak = std::max(peak, w.weights[i]);
        CHECK(w.weights[i] >= 0.0);
    }
    CHECK(asym < 1e-10 * peak);
}

TEST_CASE("run_fp series") {
    const DeviceParams p = point4();
    const auto times = time_grid(0.0, 4e-6, 0.1e-6);
    const ProbabilitySeries dark = run_fp(dark_schedule(), p, 7.0, times);
    const ProbabilitySeries probe = run_fp(probe_schedule(), p, 7.0, times);
    REQUIRE(dark.times.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(dark.mass[i] - 1.0) < 1e-6);
        CHECK(probe.probability[i] >= dark.probability[i] - 1e-9);
    }
    // before the probe the two runs coincide
    CHECK(probe.probability[2] == Approx(dark.probability[2]).epsilon(1e-12));

    // a zero-tilt phase reproduces the dark run
    PulseSchedule zero = probe_schedule();
    zero.probe.phase = 3 * std::numbers::pi / 4;
    const ProbabilitySeries z = run_fp(zero, p, 7.0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(z.probability[i] - dark.probability[i]) < 1e-6);
    }

    // deep single well: essentially no dark counts
    const ProbabilitySeries deep = run_fp(dark_schedule(), reference_device(0.445, -0.408), 7.0, times);
    for (double v : deep.probability) CHECK(v < 1e-3);

    const double bad[] = {2e-6, 1e-6};
    CHECK_THROWS_AS((void)run_fp(dark_schedule(), p, 7.0, bad), std::invalid_argument);
}

TEST_CASE("refining the grid and step barely moves the dark count") {
    const DeviceParams p = point4();
    const double t[] = {1.23e-6};
    FokkerPlanckRun coarse;
    coarse.grid = default_grid(p, 2048);
    FokkerPlanckRun fine;
    fine.grid = default_grid(p, 4095);
    fine.options.dt = 1e-9;
    const double a = run_fp(dark_schedule(), p, 7.0, t, coarse).probability[0];
    const double b = run_fp(dark_schedule(), p, 7.0, t, fine).probability[0];
    CHECK(std::abs(a - b) < 1e-3);
}

TEST_CASE("mass drift beyond the limit aborts") {
    const DeviceParams p = point4();
    FokkerPlanckOptions opt;
    opt.max_mass_drift = -1.0;  // any drift at all counts as too much
    const DensityGrid w = init_density(InitialDensity::thermal(), default_grid(p, 256));
    CHECK_THROWS_AS((void)evolve(w, p, dark_schedule(), 1e-8, opt), NumericalError);
    opt = {};
    opt.dt = 0.0;
    CHECK_THROWS_AS((void)evolve(w, p, dark_schedule(), 1e-8, opt), std::invalid_argument);
    CHECK_THROWS_AS((void)evolve(evolve(w, p, dark_schedule(), 1e-8), p, dark_schedule(), 0.5e-8),
                    std::invalid_argument);
}

TEST_CASE("time grid") {
    const auto t = time_grid(0.0, 4e-6, 0.2e-6);
    CHECK(t.size() == 21);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 4e-6);
    CHECK_THROWS_AS((void)time_grid(1.0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("many short evolve calls match one long call") {
    const DeviceParams p = point4();
    const PulseSchedule s = probe_schedule();
    const DensityGrid w0 = init_density(InitialDensity::thermal(), default_grid(p, 1024));
    const DensityGrid once = evolve(w0, p, s, 1.5e-6);
    DensityGrid steps = w0;
    for (double t : time_grid(0.01e-6, 1.5e-6, 0.01e-6)) steps = evolve(steps, p, s, t);
    CHECK(steps.steps_taken == once.steps_taken);
    CHECK(probability_outside(steps, 7.0) == Approx(probability_outside(once, 7.0)).epsilon(1e-9));
    CHECK(density_variance(steps) == Approx(density_variance(once)).epsilon(1e-9));
}

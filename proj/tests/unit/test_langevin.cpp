#include "critsense/analytic_ou.hpp"
#include "critsense/errors.hpp"
#include "critsense/langevin.hpp"
#include "critsense/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace critsense;
using doctest::Approx;

namespace {

DeviceParams point4() { return reference_device(0.506, 0.111); }

PulseSchedule dark_schedule(double t_end = 4e-6) {
    PulseSchedule s;
    s.probe.amp = 0.0;
    s.t_end = t_end;
    return s;
}

PulseSchedule probe_schedule() {
    PulseSchedule s;
    s.probe.amp = 1e3;
    return s;
}

/// |a - b| within z joint binomial standard errors.
bool agree(double a, double b, std::size_t n_a, std::size_t n_b, double z = 3.0) {
    const double pooled = 0.5 * (a + b);
    const double se = std::sqrt(std::max(pooled * (1 - pooled), 1e-4) *
                                (1.0 / static_cast<double>(n_a) + 1.0 / static_cast<double>(n_b)));
    return std::abs(a - b) <= z * se;
}

}  // namespace

TEST_CASE("full drift") {
    const DeviceParams p = point4();
    const double kg = p.total_loss();
    const QuadratureDrift zero = drift_full(0.0, 0.0, p, 0.0, 0.0);
    CHECK(zero.dq_dt == 0.0);
    CHECK(zero.dp_dt == 0.0);

    // linear coefficients at theta = pi/2, theta_P = 0
    DeviceParams lin = p;
    lin.kerr = 0.0;
    lin.detuning = 0.0;
    CHECK(drift_full(1.0, 0.0, lin, 0, 0).dq_dt == Approx(lin.pump_amp - 0.5 * kg).epsilon(1e-12));
    CHECK(drift_full(0.0, 1.0, lin, 0, 0).dp_dt ==
          Approx(-(lin.pump_amp + 0.5 * kg)).epsilon(1e-12));

    const QuadratureDrift f = drift_full(5.0, 0.0, p, 0.0, 0.0);
    CHECK(f.dq_dt / kg == Approx(0.03).epsilon(1e-9));
    CHECK(f.dp_dt / kg == Approx(-0.5316).epsilon(1e-9));

    // probe terms
    const double drive = std::sqrt(2 * p.kappa) * 1e3;
    const QuadratureDrift g = drift_full(0.0, 0.0, p, 1e3, std::numbers::pi / 4);
    CHECK(g.dq_dt == Approx(-drive).epsilon(1e-12));
    CHECK(std::abs(g.dp_dt) < 1e-9 * drive);
}

TEST_CASE("noise-free step is explicit Euler") {
    DeviceParams p = point4();
    p.kerr = 0.0;
    const double dt = 1e-9;
    QuadratureState s{1.5, -0.7};
    for (int i = 0; i < 50; ++i) {
        const QuadratureDrift f = drift_full(s.q, s.p, p, 1e3, 0.3);
        const QuadratureState next = step(s, dt, 0.0, 0.0, p, 1e3, 0.3);
        CHECK(next.q == s.q + f.dq_dt * dt);
        CHECK(next.p == s.p + f.dp_dt * dt);
        s = next;
    }
    // noise enters with a minus sign and variance k (n_T + 1/2) dt
    const QuadratureState n = step({0.0, 0.0}, dt, 1.0, 0.0, p, 0.0, 0.0);
    CHECK(n.q == Approx(-std::sqrt(p.total_loss() * 0.5 * dt)).epsilon(1e-14));
    CHECK_THROWS_AS((void)step({1e300, 1e300}, dt, 0.0, 0.0, reference_device(0.506, 0.111), 0, 0),
                    NumericalError);
}

TEST_CASE("trajectories are reproducible from the seed") {
    const DeviceParams p = point4();
    const PulseSchedule s = probe_schedule();
    const LangevinOptions opt;
    const Trajectory a = simulate_trajectory(s, p, opt, 42);
    const Trajectory b = simulate_trajectory(s, p, opt, 42);
    const Trajectory c = simulate_trajectory(s, p, opt, 43);
    CHECK(a.q == b.q);
    CHECK(a.p == b.p);
    CHECK(a.q != c.q);
    CHECK(a.seed == 42);
    REQUIRE(a.times.size() == 401);
    CHECK(a.times[1] == Approx(1e-8));
    CHECK(std::is_sorted(a.times.begin(), a.times.end()));
    CHECK(a.q.size() == a.times.size());
    CHECK(a.p.size() == a.times.size());

    const Trajectory r = simulate_reduced(s, p, opt, 42);
    CHECK(r.p.empty());
    CHECK(r.q == simulate_reduced(s, p, opt, 42).q);
}

TEST_CASE("ensemble counts do not depend on the worker count") {
    const DeviceParams p = point4();
    const PulseSchedule s = probe_schedule();
    const auto seeds = sequential_seeds(7, 64);
    LangevinOptions one;
    one.workers = 1;
    LangevinOptions four;
    four.workers = 4;
    const SwitchingSeries a = run_ensemble(seeds, s, p, one, 7.0);
    const SwitchingSeries b = run_ensemble(seeds, s, p, four, 7.0);
    CHECK(a.switched == b.switched);
    CHECK(a.n_runs == 64);

    // the series agrees with per-trajectory indicators
    const std::size_t k = a.index_at(1.23e-6);
    std::size_t count = 0;
    for (auto seed : seeds) count += switch_indicator(simulate_trajectory(s, p, one, seed), 1.23e-6, 7.0);
    CHECK(count == a.switched[k]);
}

TEST_CASE("a single quiet run gives a flat zero series") {
    const auto seeds = sequential_seeds(1, 1);
    const SwitchingSeries s = run_ensemble(seeds, probe_schedule(), point4(), {}, 1e6);
    CHECK(std::all_of(s.switched.begin(), s.switched.end(), [](auto n) { return n == 0; }));
}

TEST_CASE("pure noise spreads as 2 D t") {
    const DeviceParams p = point4();
    LangevinOptions opt;
    opt.drift_enabled = false;
    opt.record_stride = 100;
    const std::size_t n = 4000;
    const auto seeds = sequential_seeds(99, n);
    const EnsembleMoments m = ensemble_moments(seeds, dark_schedule(2e-6), p, opt);
    const double d = diffusion_constant(p);
    for (std::size_t i = 1; i < m.times.size(); ++i) {
        const double expected = 2 * d * m.times[i];
        const double se = expected * std::sqrt(2.0 / (n - 1.0));
        CHECK(std::abs(m.displacement_variance[i] - expected) < 3 * se);
    }
}

TEST_CASE("Kerr-free reduced ensemble follows the OU moments") {
    DeviceParams p = point4();
    p.kerr = 0.0;
    const PulseSchedule s = probe_schedule();
    LangevinOptions opt;
    opt.model = LangevinModel::Reduced;
    opt.record_stride = 200;
    const std::size_t n = 2000;
    const EnsembleMoments m = ensemble_moments(sequential_seeds(5, n), s, p, opt);
    for (std::size_t i = 0; i < m.times.size(); ++i) {
        const OuMoments ou = ou_propagate(m.times[i], p, s);
        CAPTURE(m.times[i]);
        const double se_mean = std::sqrt(ou.variance / n);
        CHECK(std::abs(m.mean[i] - ou.mean) < 3 * se_mean + 0.01 * std::abs(ou.mean));
        const double se_var = ou.variance * std::sqrt(2.0 / (n - 1.0));
        CHECK(std::abs(m.variance[i] - ou.variance) < 3 * se_var + 0.01 * ou.variance);
    }
}

TEST_CASE("reduced and full dark counts agree at the operating point") {
    const DeviceParams p = point4();
    const PulseSchedule s = dark_schedule();
    const auto seeds = sequential_seeds(11, 1500);
    LangevinOptions full;
    LangevinOptions reduced;
    reduced.model = LangevinModel::Reduced;
    const SwitchingSeries a = run_ensemble(seeds, s, p, full, 7.0);
    const SwitchingSeries b = run_ensemble(seeds, s, p, reduced, 7.0);
    const std::size_t k = a.index_at(1.23e-6);
    CHECK(agree(a.probability(k), b.probability(k), a.n_runs, b.n_runs));
}

TEST_CASE("below threshold both quadratures stay small") {
    DeviceParams p = reference_device(0.46, 0.0);
    p.detuning = units::mhz_to_rad(0.67);
    const Trajectory t = simulate_trajectory(dark_schedule(20e-6), p, {}, 3);
    const auto [qlo, qhi] = std::minmax_element(t.q.begin(), t.q.end());
    const auto [plo, phi] = std::minmax_element(t.p.begin(), t.p.end());
    CHECK(std::max(-*qlo, *qhi) < 10.0);
    CHECK(std::max(-*plo, *phi) < 5.0);
}

TEST_CASE("strong tilt slides Q toward negative values") {
    const DeviceParams p = point4();
    LangevinOptions opt;
    opt.model = LangevinModel::Reduced;
    PulseSchedule s = probe_schedule();
    s.probe.amp = 1e5;
    const Trajectory t = simulate_reduced(s, p, opt, 8);
    // coarse samples 100 ns apart while still above the outer well
    const auto at = [&](double time) { return t.q[static_cast<std::size_t>(std::llround(time / 1e-8))]; };
    double prev = at(0.3e-6);
    for (double time = 0.4e-6; time < 1.2e-6 && prev > -25.0; time += 0.1e-6) {
        CHECK(at(time) < prev);
        prev = at(time);
    }
    CHECK(at(1.2e-6) < -25.0);
}

TEST_CASE("switch indicator") {
    Trajectory t;
    t.times = {0.0, 1e-8, 2e-8};
    t.q = {7.1, -7.1, 0.0};
    t.p = {0, 0, 0};
    CHECK(switch_indicator(t, 0.0, 7.0));
    CHECK(switch_indicator(t, 1e-8, 7.0));
    CHECK_FALSE(switch_indicator(t, 2e-8, 7.0));
    CHECK(switch_indicator(t, 0.4e-8, 7.0));
    CHECK_THROWS_AS((void)switch_indicator(t, 5e-8, 7.0), std::out_of_range);
    CHECK_THROWS_AS((void)switch_indicator(t, -1e-8, 7.0), std::out_of_range);
}

TEST_CASE("options and schedule validation") {
    const DeviceParams p = point4();
    LangevinOptions opt;
    opt.dt = 1.1 * max_stable_dt(p);
    CHECK_THROWS_AS(opt.validate(p), std::invalid_argument);
    opt.dt = 0.0;
    CHECK_THROWS_AS(opt.validate(p), std::invalid_argument);
    opt = {};
    opt.record_stride = 0;
    CHECK_THROWS_AS(opt.validate(p), std::invalid_argument);

    PulseSchedule s;
    s.pump_on_at = 0.5e-6;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.t_end = 1e-6;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("spectrum of simple signals") {
    std::vector<double> constant(64, 2.5);
    const AmplitudeSpectrum c = amplitude_spectrum(constant, 1e6);
    CHECK(c.amplitudes[0] == Approx(2.5));
    for (std::size_t i = 1; i < c.amplitudes.size(); ++i) CHECK(std::abs(c.amplitudes[i]) < 1e-12);

    const double rate = 1e6;
    const std::size_t n = 1000;
    const double f = 50e3;  // integer number of cycles
    std::vector<double> wave(n);
    for (std::size_t i = 0; i < n; ++i) wave[i] = 0.8 * std::sin(2 * std::numbers::pi * f * i / rate);
    const AmplitudeSpectrum w = amplitude_spectrum(wave, rate);
    const auto peak = std::max_element(w.amplitudes.begin(), w.amplitudes.end()) - w.amplitudes.begin();
    CHECK(w.frequencies[peak] == Approx(f));
    CHECK(w.amplitudes[peak] == Approx(0.8).epsilon(1e-9));
    CHECK(w.frequencies.back() == Approx(rate / 2));

    const Trajectory t = simulate_trajectory(dark_schedule(), point4(), {}, 1);
    CHECK_THROWS_AS((void)amplitude_spectrum(t, 2e8), std::invalid_argument);
    CHECK_NOTHROW((void)amplitude_spectrum(t, 6.738e6, Quadrature::P));
}

TEST_CASE("first passage helper") {
    DeviceParams p = point4();
    p.kerr = 0.0;
    p.pump_amp = alpha_critical(p);
    const auto t = first_passage_time(p, 1e3, std::numbers::pi / 4, 0.0, -7.0, 1e-9, 20e-6, 3);
    REQUIRE(t);
    CHECK(*t > 0.0);
    CHECK(*t == first_passage_time(p, 1e3, std::numbers::pi / 4, 0.0, -7.0, 1e-9, 20e-6, 3));
    CHECK_THROWS_AS((void)first_passage_time(p, 1e3, 0.0, 0.0, 1.0, 1e-9, 1e-6, 3),
                    std::invalid_argument);
}

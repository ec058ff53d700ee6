#include "critsense/analytic_ou.hpp"
#include "critsense/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

using namespace critsense;
using doctest::Approx;

namespace {

const double kPoint4DeltaMhz = 0.111 * (4.44 + 2.30);

SweepSpec single_cell(SweepEngine engine, std::size_t runs = 40) {
    SweepSpec spec;
    spec.alpha_over_kg = {0.506, 0.506, 1};
    spec.delta_mhz = {kPoint4DeltaMhz, kPoint4DeltaMhz, 1};
    spec.engine = engine;
    spec.runs_per_cell = runs;
    spec.base_seed = 77;
    spec.workers = 1;
    return spec;
}

PulseSchedule probe_schedule() {
    PulseSchedule s;
    s.probe.amp = 1e3;
    return s;
}

}  // namespace

TEST_CASE("ranges and engines") {
    const auto v = Range{0.46, 0.54, 9}.values();
    REQUIRE(v.size() == 9);
    CHECK(v.front() == 0.46);
    CHECK(v.back() == Approx(0.54));
    CHECK(v[4] == Approx(0.50));
    CHECK(Range{0.3, 0.3, 1}.values() == std::vector<double>{0.3});
    CHECK_THROWS_AS(Range({1.0, 0.0, 3}).validate("x"), std::invalid_argument);
    CHECK_THROWS_AS(Range({0.0, 1.0, 0}).validate("x"), std::invalid_argument);
    for (SweepEngine e : {SweepEngine::HeisenbergLangevin, SweepEngine::FokkerPlanck,
                          SweepEngine::AnalyticOU}) {
        CHECK(parse_engine(to_string(e)) == e);
    }
    CHECK_THROWS_AS((void)parse_engine("monte-carlo"), std::invalid_argument);
}

TEST_CASE("cell seeds are distinct across cells and runs") {
    std::set<std::uint64_t> seen;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t d = 0; d < 4; ++d)
            for (std::size_t r = 0; r < 50; ++r) seen.insert(cell_seed(5, a, d, 0, r));
    CHECK(seen.size() == 800);
    CHECK(cell_seed(5, 1, 2, 0, 3) == cell_seed(5, 1, 2, 0, 3));
    CHECK(cell_seed(5, 1, 2, 0, 3) != cell_seed(6, 1, 2, 0, 3));
}

TEST_CASE("a Langevin cell is its ensemble with the cell seeds") {
    const SweepSpec spec = single_cell(SweepEngine::HeisenbergLangevin);
    const DeviceParams base = reference_device(0.506, 0.111);
    const SweepResult r = run_sweep(spec, base, probe_schedule());
    REQUIRE(r.rows.size() == 1);
    CHECK_FALSE(r.rows[0].failed);

    DeviceParams p = base;
    p.detuning = units::mhz_to_rad(kPoint4DeltaMhz);
    PulseSchedule s = probe_schedule();
    s.t_end = 1.23e-6;
    LangevinOptions opt;
    opt.workers = 1;
    const auto seeds = cell_seeds(spec, 0, 0, 0);
    const SwitchingSeries probe = run_ensemble(seeds, s, p, opt, 7.0);
    s.probe.amp = 0.0;
    const SwitchingSeries dark = run_ensemble(seeds, s, p, opt, 7.0);
    const std::size_t i = probe.index_at(1.23e-6);
    CHECK(r.rows[0].stats.p1plus_raw == probe.probability(i));
    CHECK(r.rows[0].stats.p_dark == dark.probability(i));
}

TEST_CASE("sweeps are deterministic and independent of workers") {
    SweepSpec spec = single_cell(SweepEngine::HeisenbergLangevin, 20);
    spec.alpha_over_kg = {0.49, 0.52, 3};
    spec.delta_mhz = {0.6, 0.8, 2};
    const DeviceParams base = reference_device(0.5, 0.1);
    const SweepResult a = run_sweep(spec, base, probe_schedule());
    spec.workers = 3;
    const SweepResult b = run_sweep(spec, base, probe_schedule());
    REQUIRE(a.rows.size() == 6);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].i_alpha == i / 2);
        CHECK(a.rows[i].i_delta == i % 2);
        CHECK(a.rows[i].stats.p_dark == b.rows[i].stats.p_dark);
        CHECK(a.rows[i].stats.p1plus_raw == b.rows[i].stats.p1plus_raw);
    }
    REQUIRE(a.critical_line.size() == 2);
    const double kg = base.total_loss();
    const double d = units::mhz_to_rad(0.8) / kg;
    CHECK(a.critical_line[1].delta_over_kg == Approx(d));
    CHECK(a.critical_line[1].alpha_over_kg == Approx(std::sqrt(0.25 + d * d)));
}

TEST_CASE("Fokker-Planck cell at the operating point") {
    const SweepResult r = run_sweep(single_cell(SweepEngine::FokkerPlanck),
                                    reference_device(0.506, 0.111), probe_schedule());
    REQUIRE(r.rows.size() == 1);
    const SwitchingStats& s = r.rows[0].stats;
    CHECK(s.eta > 0.45);
    CHECK(s.eta < 0.70);
    CHECK(s.p_dark > 0.05);
    CHECK(s.p_dark < 0.30);
}

TEST_CASE("dark counts grow with the pump") {
    SweepSpec spec = single_cell(SweepEngine::FokkerPlanck);
    spec.alpha_over_kg = {0.47, 0.53, 3};
    spec.fp_points = 1024;
    const SweepResult r = run_sweep(spec, reference_device(0.5, 0.111), probe_schedule());
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].stats.p_dark < r.rows[1].stats.p_dark);
    CHECK(r.rows[1].stats.p_dark < r.rows[2].stats.p_dark);
    CHECK(r.rows[0].stats.p_dark < 0.02);
}

TEST_CASE("analytic cells drop the Kerr term") {
    const SweepSpec spec = single_cell(SweepEngine::AnalyticOU);
    const DeviceParams base = reference_device(0.506, 0.111);
    const SweepResult r = run_sweep(spec, base, probe_schedule());
    DeviceParams p = base;
    p.detuning = units::mhz_to_rad(kPoint4DeltaMhz);
    p.kerr = 0.0;
    PulseSchedule s = probe_schedule();
    s.t_end = 1.23e-6;
    CHECK(r.rows[0].stats.p1plus_raw ==
          Approx(ou_switching_probability(1.23e-6, 7.0, p, s)).epsilon(1e-12));
}

TEST_CASE("phase sweep without a probe is flat") {
    SweepSpec spec = single_cell(SweepEngine::AnalyticOU);
    PulseSchedule s;
    s.probe.amp = 0.0;
    std::vector<double> phis;
    for (int i = 0; i < 8; ++i) phis.push_back(i * std::numbers::pi / 4);
    const PhaseSweepResult r = phase_sweep(phis, spec, reference_device(0.506, 0.111), s);
    REQUIRE(r.rows.size() == 8);
    for (const auto& row : r.rows) {
        CHECK(row.stats.p1plus_raw == r.dark.p_dark);
        CHECK(std::isnan(row.stats.eta));
    }

    spec.engine = SweepEngine::HeisenbergLangevin;
    spec.runs_per_cell = 20;
    const PhaseSweepResult hl = phase_sweep(phis, spec, reference_device(0.506, 0.111), s);
    // no probe: only seed-to-seed scatter remains
    for (std::size_t k : hl.switched) CHECK(k <= 20);
    CHECK_THROWS_AS((void)phase_sweep({}, spec, reference_device(0.506, 0.111), s),
                    std::invalid_argument);
}

TEST_CASE("failing and saturated cells are flagged") {
    SweepSpec spec = single_cell(SweepEngine::FokkerPlanck);
    spec.fp_points = 2;
    const SweepResult bad = run_sweep(spec, reference_device(0.506, 0.111), probe_schedule());
    CHECK(bad.n_failed == 1);
    CHECK(bad.rows[0].failed);
    CHECK_FALSE(bad.rows[0].error.empty());
    CHECK(std::isnan(bad.rows[0].stats.p1plus_raw));

    spec = single_cell(SweepEngine::HeisenbergLangevin, 20);
    PulseSchedule strong = probe_schedule();
    strong.probe.amp = 3e4;
    const SweepResult sat = run_sweep(spec, reference_device(0.506, 0.111), strong);
    CHECK(sat.rows[0].stats.p1plus_raw == 1.0);
    CHECK(sat.rows[0].masked);
    CHECK(std::isnan(sat.rows[0].stats.eta));
}

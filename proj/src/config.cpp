#include "critsense/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace critsense {

using nlohmann::json;

namespace {

// Reads typed keys from one section and remembers which ones were used.
class SectionReader {
public:
    SectionReader(const json& doc, std::string name) : name_(std::move(name)) {
        if (!doc.contains(name_)) return;
        section_ = &doc.at(name_);
        if (!section_->is_object()) throw ConfigError(name_, "expected an object");
    }

    template <typename T>
    void read(const char* key, T& target) {
        const json* v = find(key);
        if (v) target = convert<T>(*v, key);
    }

    template <typename T>
    void read(const char* key, std::optional<T>& target) {
        const json* v = find(key);
        if (v) target = convert<T>(*v, key);
    }

    void finish() const {
        if (!section_) return;
        for (const auto& [key, _] : section_->items()) {
            if (!seen_.count(key)) throw ConfigError(path(key), "unknown key");
        }
    }

private:
    const json* find(const char* key) {
        seen_.insert(key);
        if (!section_ || !section_->contains(key)) return nullptr;
        return &section_->at(key);
    }

    template <typename T>
    T convert(const json& v, const char* key) const {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path(key), "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(path(key), "expected a number");
            const double x = v.get<double>();
            if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
            return x;
        } else {
            if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0 &&
                                           !v.is_number_unsigned())) {
                throw ConfigError(path(key), "expected a non-negative integer");
            }
            return v.get<T>();
        }
    }

    [[nodiscard]] std::string path(const std::string& key) const { return name_ + "." + key; }

    std::string name_;
    const json* section_ = nullptr;
    std::set<std::string> seen_;
};

void exactly_one(bool a, bool b, const std::string& path_a, const std::string& path_b) {
    if (a && b) throw ConfigError(path_a, "conflicts with " + path_b + "; set only one");
    if (!a && !b) throw ConfigError(path_a, "missing (or set " + path_b + ")");
}

void require_positive(double x, const std::string& path) {
    if (!(x > 0.0)) throw ConfigError(path, "must be positive");
}

}  // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
    static const std::set<std::string> sections{"device", "probe",  "schedule",
                                                "engine", "sweep", "output"};
    for (const auto& [key, _] : doc.items()) {
        if (!sections.count(key)) throw ConfigError(key, "unknown section");
    }
    RunConfig c;

    SectionReader dev(doc, "device");
    dev.read("kappa_mhz", c.device.kappa_mhz);
    dev.read("gamma_mhz", c.device.gamma_mhz);
    dev.read("kerr_khz", c.device.kerr_khz);
    dev.read("kerr_over_kg", c.device.kerr_over_kg);
    dev.read("delta_mhz", c.device.delta_mhz);
    dev.read("delta_over_kg", c.device.delta_over_kg);
    dev.read("alpha_over_kg", c.device.alpha_over_kg);
    dev.read("alpha_mhz", c.device.alpha_mhz);
    dev.read("theta_rad", c.device.theta_rad);
    dev.read("theta_p_rad", c.device.theta_p_rad);
    dev.read("n_thermal", c.device.n_thermal);
    dev.finish();
    if (!c.device.kappa_mhz) throw ConfigError("device.kappa_mhz", "missing");
    if (!c.device.gamma_mhz) throw ConfigError("device.gamma_mhz", "missing");
    exactly_one(c.device.kerr_khz.has_value(), c.device.kerr_over_kg.has_value(),
                "device.kerr_khz", "device.kerr_over_kg");
    exactly_one(c.device.delta_mhz.has_value(), c.device.delta_over_kg.has_value(),
                "device.delta_mhz", "device.delta_over_kg");
    exactly_one(c.device.alpha_over_kg.has_value(), c.device.alpha_mhz.has_value(),
                "device.alpha_over_kg", "device.alpha_mhz");

    SectionReader probe(doc, "probe");
    probe.read("b_sqrt_hz", c.probe.b_sqrt_hz);
    probe.read("phi_rad", c.probe.phi_rad);
    probe.read("t_on_us", c.probe.t_on_us);
    probe.read("t_off_us", c.probe.t_off_us);
    probe.finish();

    SectionReader sched(doc, "schedule");
    sched.read("pump_on_us", c.schedule.pump_on_us);
    sched.read("t_end_us", c.schedule.t_end_us);
    sched.finish();

    SectionReader eng(doc, "engine");
    eng.read("dt_ns", c.engine.dt_ns);
    eng.read("record_stride", c.engine.record_stride);
    eng.read("model", c.engine.model);
    eng.read("n_runs", c.engine.n_runs);
    eng.read("q_threshold", c.engine.q_threshold);
    eng.read("base_seed", c.engine.base_seed);
    eng.read("workers", c.engine.workers);
    eng.read("fp_points", c.engine.fp_points);
    eng.read("fp_dt_ns", c.engine.fp_dt_ns);
    eng.read("output_step_us", c.engine.output_step_us);
    eng.finish();

    SectionReader sw(doc, "sweep");
    sw.read("alpha_lo", c.sweep.alpha_lo);
    sw.read("alpha_hi", c.sweep.alpha_hi);
    sw.read("alpha_points", c.sweep.alpha_points);
    sw.read("delta_lo_mhz", c.sweep.delta_lo_mhz);
    sw.read("delta_hi_mhz", c.sweep.delta_hi_mhz);
    sw.read("delta_points", c.sweep.delta_points);
    sw.read("phi_lo_rad", c.sweep.phi_lo_rad);
    sw.read("phi_hi_rad", c.sweep.phi_hi_rad);
    sw.read("phi_points", c.sweep.phi_points);
    sw.read("engine", c.sweep.engine);
    sw.read("runs_per_cell", c.sweep.runs_per_cell);
    sw.read("measure_at_us", c.sweep.measure_at_us);
    sw.finish();

    SectionReader out(doc, "output");
    out.read("out_dir", c.output.out_dir);
    out.read("plot_script", c.output.plot_script);
    out.finish();

    // Resolve everything once so constraint violations surface at parse time.
    const DeviceParams params = device_params(c);
    (void)pulse_schedule(c);
    (void)langevin_options(c);
    (void)fokker_planck_run(c, params);
    (void)sweep_spec(c);
    return c;
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
        throw ConfigError(std::string(assignment), "override must look like section.key=value");
    }
    const std::string section(assignment.substr(0, dot));
    const std::string key(assignment.substr(dot + 1, eq - dot - 1));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    if (!doc.is_object()) doc = json::object();
    doc[section][key] = value;
}

RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::string>& overrides) {
    json doc = json::object();
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError(*path, "cannot open config file");
        doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw ConfigError(*path, "not valid JSON");
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return parse_config(doc);
}

json to_json(const RunConfig& c) {
    json dev = json::object();
    auto put = [](json& j, const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put(dev, "kappa_mhz", c.device.kappa_mhz);
    put(dev, "gamma_mhz", c.device.gamma_mhz);
    put(dev, "kerr_khz", c.device.kerr_khz);
    put(dev, "kerr_over_kg", c.device.kerr_over_kg);
    put(dev, "delta_mhz", c.device.delta_mhz);
    put(dev, "delta_over_kg", c.device.delta_over_kg);
    put(dev, "alpha_over_kg", c.device.alpha_over_kg);
    put(dev, "alpha_mhz", c.device.alpha_mhz);
    dev["theta_rad"] = c.device.theta_rad;
    dev["theta_p_rad"] = c.device.theta_p_rad;
    dev["n_thermal"] = c.device.n_thermal;
    return {
        {"device", dev},
        {"probe",
         {{"b_sqrt_hz", c.probe.b_sqrt_hz},
          {"phi_rad", c.probe.phi_rad},
          {"t_on_us", c.probe.t_on_us},
          {"t_off_us", c.probe.t_off_us}}},
        {"schedule", {{"pump_on_us", c.schedule.pump_on_us}, {"t_end_us", c.schedule.t_end_us}}},
        {"engine",
         {{"dt_ns", c.engine.dt_ns},
          {"record_stride", c.engine.record_stride},
          {"model", c.engine.model},
          {"n_runs", c.engine.n_runs},
          {"q_threshold", c.engine.q_threshold},
          {"base_seed", c.engine.base_seed},
          {"workers", c.engine.workers},
          {"fp_points", c.engine.fp_points},
          {"fp_dt_ns", c.engine.fp_dt_ns},
          {"output_step_us", c.engine.output_step_us}}},
        {"sweep",
         {{"alpha_lo", c.sweep.alpha_lo},
          {"alpha_hi", c.sweep.alpha_hi},
          {"alpha_points", c.sweep.alpha_points},
          {"delta_lo_mhz", c.sweep.delta_lo_mhz},
          {"delta_hi_mhz", c.sweep.delta_hi_mhz},
          {"delta_points", c.sweep.delta_points},
          {"phi_lo_rad", c.sweep.phi_lo_rad},
          {"phi_hi_rad", c.sweep.phi_hi_rad},
          {"phi_points", c.sweep.phi_points},
          {"engine", c.sweep.engine},
          {"runs_per_cell", c.sweep.runs_per_cell},
          {"measure_at_us", c.sweep.measure_at_us}}},
        {"output", {{"out_dir", c.output.out_dir}, {"plot_script", c.output.plot_script}}},
    };
}

DeviceParams device_params(const RunConfig& c) {
    const DeviceConfig& d = c.device;
    if (!d.kappa_mhz) throw ConfigError("device.kappa_mhz", "missing");
    if (!d.gamma_mhz) throw ConfigError("device.gamma_mhz", "missing");
    require_positive(*d.kappa_mhz, "device.kappa_mhz");
    if (!(*d.gamma_mhz >= 0.0)) throw ConfigError("device.gamma_mhz", "must be non-negative");
    DeviceParams p;
    p.kappa = units::mhz_to_rad(*d.kappa_mhz);
    p.gamma = units::mhz_to_rad(*d.gamma_mhz);
    const double kg = p.total_loss();
    p.kerr = d.kerr_khz ? units::khz_to_rad(*d.kerr_khz) : *d.kerr_over_kg * kg;
    if (p.kerr > 0.0) {
        throw ConfigError(d.kerr_khz ? "device.kerr_khz" : "device.kerr_over_kg",
                          "must be <= 0 (softening Kerr)");
    }
    p.detuning = d.delta_mhz ? units::mhz_to_rad(*d.delta_mhz) : *d.delta_over_kg * kg;
    p.pump_amp = d.alpha_mhz ? units::mhz_to_rad(*d.alpha_mhz) : *d.alpha_over_kg * kg;
    if (p.pump_amp < 0.0) {
        throw ConfigError(d.alpha_mhz ? "device.alpha_mhz" : "device.alpha_over_kg",
                          "must be non-negative");
    }
    p.frame_phase = d.theta_rad;
    p.pump_phase = d.theta_p_rad;
    if (!(d.n_thermal >= 0.0)) throw ConfigError("device.n_thermal", "must be non-negative");
    p.n_thermal = d.n_thermal;
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ConfigError("device", e.what());
    }
    return p;
}

PulseSchedule pulse_schedule(const RunConfig& c) {
    if (!(c.probe.b_sqrt_hz >= 0.0)) throw ConfigError("probe.b_sqrt_hz", "must be non-negative");
    require_positive(c.probe.t_on_us, "probe.t_on_us");
    require_positive(c.probe.t_off_us, "probe.t_off_us");
    require_positive(c.schedule.t_end_us, "schedule.t_end_us");
    if (!(c.probe.t_off_us > c.probe.t_on_us)) {
        throw ConfigError("probe.t_off_us", "must be later than probe.t_on_us");
    }
    if (c.schedule.t_end_us < c.probe.t_off_us) {
        throw ConfigError("schedule.t_end_us", "must not precede probe.t_off_us");
    }
    if (!(c.schedule.pump_on_us >= 0.0) || c.schedule.pump_on_us > c.probe.t_on_us) {
        throw ConfigError("schedule.pump_on_us", "must lie in [0, probe.t_on_us]");
    }
    PulseSchedule s;
    s.pump_on_at = units::us_to_s(c.schedule.pump_on_us);
    s.probe.amp = c.probe.b_sqrt_hz;
    s.probe.phase = c.probe.phi_rad;
    s.probe.t_on = units::us_to_s(c.probe.t_on_us);
    s.probe.t_off = units::us_to_s(c.probe.t_off_us);
    s.t_end = units::us_to_s(c.schedule.t_end_us);
    return s;
}

LangevinOptions langevin_options(const RunConfig& c) {
    require_positive(c.engine.dt_ns, "engine.dt_ns");
    if (c.engine.record_stride == 0) throw ConfigError("engine.record_stride", "must be >= 1");
    if (c.engine.n_runs == 0) throw ConfigError("engine.n_runs", "must be >= 1");
    require_positive(c.engine.q_threshold, "engine.q_threshold");
    LangevinOptions o;
    o.dt = units::ns_to_s(c.engine.dt_ns);
    o.record_stride = c.engine.record_stride;
    if (c.engine.model == "full") {
        o.model = LangevinModel::Full;
    } else if (c.engine.model == "reduced") {
        o.model = LangevinModel::Reduced;
    } else {
        throw ConfigError("engine.model", "expected \"full\" or \"reduced\"");
    }
    o.workers = c.engine.workers;
    try {
        o.validate(device_params(c));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("engine.dt_ns", e.what());
    }
    return o;
}

FokkerPlanckRun fokker_planck_run(const RunConfig& c, const DeviceParams& params) {
    if (c.engine.fp_points < 3) throw ConfigError("engine.fp_points", "must be >= 3");
    require_positive(c.engine.fp_dt_ns, "engine.fp_dt_ns");
    require_positive(c.engine.output_step_us, "engine.output_step_us");
    FokkerPlanckRun run;
    run.grid = default_grid(params, c.engine.fp_points);
    run.options.dt = units::ns_to_s(c.engine.fp_dt_ns);
    if (!(c.engine.q_threshold < run.grid.q_cap)) {
        throw ConfigError("engine.q_threshold", "lies outside the Fokker-Planck grid");
    }
    return run;
}

SweepSpec sweep_spec(const RunConfig& c) {
    SweepSpec s;
    s.alpha_over_kg = {c.sweep.alpha_lo, c.sweep.alpha_hi, c.sweep.alpha_points};
    s.delta_mhz = {c.sweep.delta_lo_mhz, c.sweep.delta_hi_mhz, c.sweep.delta_points};
    if (c.sweep.phi_points > 0) s.phi = Range{c.sweep.phi_lo_rad, c.sweep.phi_hi_rad, c.sweep.phi_points};
    try {
        s.engine = parse_engine(c.sweep.engine);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("sweep.engine", e.what());
    }
    s.runs_per_cell = c.sweep.runs_per_cell;
    require_positive(c.sweep.measure_at_us, "sweep.measure_at_us");
    s.measure_at = units::us_to_s(c.sweep.measure_at_us);
    s.q_threshold = c.engine.q_threshold;
    s.base_seed = c.engine.base_seed;
    s.langevin = langevin_options(c);
    s.fokker_planck.dt = units::ns_to_s(c.engine.fp_dt_ns);
    s.fp_points = c.engine.fp_points;
    s.workers = c.engine.workers;
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("sweep", e.what());
    }
    return s;
}

}  // namespace critsense

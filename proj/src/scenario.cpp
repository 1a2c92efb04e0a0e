#include "wpdyn/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wpdyn/errors.hpp"
#include "wpdyn/invariants.hpp"
#include "wpdyn/kernels.hpp"
#include "wpdyn/oracle.hpp"
#include "wpdyn/packet.hpp"
#include "wpdyn/wigner.hpp"

namespace wpdyn {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

const std::map<std::string, Task>& task_names() {
    static const std::map<std::string, Task> names{{"evolve", Task::evolve},
                                                   {"wigner", Task::wigner},
                                                   {"kernel_check", Task::kernel_check},
                                                   {"invariants", Task::invariants},
                                                   {"oracle_compare", Task::oracle_compare}};
    return names;
}

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
    throw ConfigError("config field '" + field + "': " + msg);
}

const json* find(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) field_error(path + key, "expected a number");
    return v->get<double>();
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    const json* v = find(obj, key);
    if (!v) field_error(path + key, "missing");
    if (!v->is_number()) field_error(path + key, "expected a number");
    return v->get<double>();
}

long get_integer(const json& obj, const std::string& key, const std::string& path, long fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) field_error(path + key, "expected an integer");
    return v->get<long>();
}

const json& get_object(const json& obj, const std::string& key, const std::string& path) {
    static const json empty = json::object();
    const json* v = find(obj, key);
    if (!v) return empty;
    if (!v->is_object()) field_error(path + key, "expected an object");
    return *v;
}

FrequencyLaw parse_law(const json& sys) {
    const json* type = find(sys, "type");
    if (!type || !type->is_string()) field_error("system.type", "expected one of free, constant, ramp, modulated, tabulated");
    const auto name = type->get<std::string>();
    if (name == "free") return Free{};
    if (name == "constant") return ConstantOmega{require_number(sys, "omega", "system.")};
    if (name == "ramp")
        return RampOmega{require_number(sys, "omega0", "system."), require_number(sys, "slope", "system.")};
    if (name == "modulated")
        return ModulatedOmega{require_number(sys, "omega0", "system."), require_number(sys, "epsilon", "system."),
                              require_number(sys, "gamma", "system.")};
    if (name == "tabulated") {
        const json* table = find(sys, "table");
        if (!table || !table->is_array()) field_error("system.table", "expected an array of [t, omega] pairs");
        Tabulated law;
        for (std::size_t i = 0; i < table->size(); ++i) {
            const auto& row = (*table)[i];
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
                field_error("system.table[" + std::to_string(i) + "]", "expected [t, omega]");
            law.nodes.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        return law;
    }
    field_error("system.type", "unknown frequency law '" + name + "'");
}

json law_to_json(const FrequencyLaw& law) {
    struct Visitor {
        json operator()(const Free&) const { return {{"type", "free"}}; }
        json operator()(const ConstantOmega& l) const { return {{"type", "constant"}, {"omega", l.omega}}; }
        json operator()(const RampOmega& l) const {
            return {{"type", "ramp"}, {"omega0", l.omega0}, {"slope", l.slope}};
        }
        json operator()(const ModulatedOmega& l) const {
            return {{"type", "modulated"}, {"omega0", l.omega0}, {"epsilon", l.epsilon}, {"gamma", l.gamma}};
        }
        json operator()(const Tabulated& l) const {
            json table = json::array();
            for (const auto& [t, w] : l.nodes) table.push_back({t, w});
            return {{"type", "tabulated"}, {"table", table}};
        }
    };
    return std::visit(Visitor{}, law);
}

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

std::string to_string(Task task) {
    for (const auto& [name, t] : task_names())
        if (t == task) return name;
    return "unknown";
}

Tolerances Tolerances::profile(const std::string& name) {
    Tolerances t;
    if (name == "default") return t;
    if (name == "strict") {
        t.det_M /= 10;
        t.ermakov_invariant /= 10;
        t.uncertainty_product /= 10;
        t.p_phi /= 10;
        t.det_ermakov_identity /= 10;
        t.energy /= 10;
        t.kernel_l2 /= 10;
        t.oracle_l2 /= 10;
        t.oracle_moments /= 10;
        t.wigner /= 10;
        return t;
    }
    throw ConfigError("unknown tolerance profile '" + name + "' (expected strict or default)");
}

UniformAxis ScenarioConfig::wavefunction_axis() const {
    return {x_min, (x_max - x_min) / static_cast<double>(n_points), n_points};
}

bool ScenarioConfig::has_task(Task task) const {
    return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
}

void ScenarioConfig::validate() const {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) field_error("time.t_end", "must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) field_error("time.dt", "must be positive");
    if (dt > t_end) field_error("time.dt", "must not exceed t_end");
    if (sample_every < 1) field_error("time.sample_every", "must be >= 1");
    if (!(x_max > x_min)) field_error("grid.x_max", "must exceed x_min");
    if (n_points < 64 || !is_power_of_two(n_points)) field_error("grid.n_points", "must be a power of two >= 64");
    if (wigner_nx < 2 || wigner_np < 2) field_error("phase_space_grid", "nx and np must be >= 2");
    if (!(span_sigmas > 0.0)) field_error("phase_space_grid.span_sigmas", "must be positive");
    if (tasks.empty()) field_error("tasks", "must not be empty");
    if (oracle_dt && !(*oracle_dt > 0.0)) field_error("oracle.dt", "must be positive");
    for (double t : analysis_times) {
        if (!(t >= 0.0 && t <= t_end)) field_error("analysis_times", "times must lie in [0, t_end]");
        const double k = t / dt;
        if (std::abs(k - std::round(k)) > 1e-6) field_error("analysis_times", "times must be multiples of dt");
        if (oracle_dt) {
            const double ko = t / *oracle_dt;
            if (std::abs(ko - std::round(ko)) > 1e-6)
                field_error("analysis_times", "times must be multiples of oracle.dt");
        }
    }
}

ScenarioConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    ScenarioConfig cfg;
    if (const json* v = find(j, "name")) {
        if (!v->is_string()) field_error("name", "expected a string");
        cfg.name = v->get<std::string>();
    }
    if (const json* v = find(j, "description"); v && v->is_string()) cfg.description = v->get<std::string>();

    const json& constants = get_object(j, "constants", "");
    const Constants c(get_number(constants, "hbar", "constants.", 1.0), get_number(constants, "mass", "constants.", 1.0));

    const json* sys = find(j, "system");
    if (!sys || !sys->is_object()) field_error("system", "missing or not an object");
    cfg.system = SystemSpec(c, parse_law(*sys));

    const json& packet = get_object(j, "packet", "");
    cfg.packet = InitialPacket(get_number(packet, "x0", "packet.", 0.0), get_number(packet, "p0", "packet.", 1.0),
                               get_number(packet, "alpha0", "packet.", 1.0));

    const json& time = get_object(j, "time", "");
    cfg.t_end = require_number(time, "t_end", "time.");
    cfg.dt = get_number(time, "dt", "time.", cfg.dt);
    cfg.sample_every = static_cast<int>(get_integer(time, "sample_every", "time.", cfg.sample_every));

    const json& grid = get_object(j, "grid", "");
    cfg.x_min = get_number(grid, "x_min", "grid.", cfg.x_min);
    cfg.x_max = get_number(grid, "x_max", "grid.", cfg.x_max);
    const long n = get_integer(grid, "n_points", "grid.", static_cast<long>(cfg.n_points));
    if (n < 0) field_error("grid.n_points", "must be positive");
    cfg.n_points = static_cast<std::size_t>(n);

    const json& ps = get_object(j, "phase_space_grid", "");
    const long nx = get_integer(ps, "nx", "phase_space_grid.", static_cast<long>(cfg.wigner_nx));
    const long np = get_integer(ps, "np", "phase_space_grid.", static_cast<long>(cfg.wigner_np));
    if (nx < 2 || np < 2) field_error("phase_space_grid", "nx and np must be >= 2");
    cfg.wigner_nx = static_cast<std::size_t>(nx);
    cfg.wigner_np = static_cast<std::size_t>(np);
    cfg.span_sigmas = get_number(ps, "span_sigmas", "phase_space_grid.", cfg.span_sigmas);

    if (const json* v = find(j, "analysis_times")) {
        if (!v->is_array()) field_error("analysis_times", "expected an array of numbers");
        cfg.analysis_times.clear();
        for (const auto& t : *v) {
            if (!t.is_number()) field_error("analysis_times", "expected an array of numbers");
            cfg.analysis_times.push_back(t.get<double>());
        }
    }

    const json& oracle = get_object(j, "oracle", "");
    if (find(oracle, "dt")) cfg.oracle_dt = require_number(oracle, "dt", "oracle.");

    if (const json* v = find(j, "frozen_width_diagnostic")) {
        if (!v->is_boolean()) field_error("frozen_width_diagnostic", "expected a boolean");
        cfg.frozen_width_diagnostic = v->get<bool>();
    }

    if (const json* v = find(j, "tasks")) {
        if (!v->is_array()) field_error("tasks", "expected an array of task names");
        cfg.tasks.clear();
        for (const auto& t : *v) {
            if (!t.is_string()) field_error("tasks", "expected task names");
            auto it = task_names().find(t.get<std::string>());
            if (it == task_names().end()) field_error("tasks", "unknown task '" + t.get<std::string>() + "'");
            if (!cfg.has_task(it->second)) cfg.tasks.push_back(it->second);
        }
    }

    if (const json* v = find(j, "tolerance_profile")) {
        if (!v->is_string()) field_error("tolerance_profile", "expected a string");
        cfg.tolerance_profile = v->get<std::string>();
    }
    cfg.tolerances = Tolerances::profile(cfg.tolerance_profile);
    if (const json* v = find(j, "tolerances")) {
        if (!v->is_object()) field_error("tolerances", "expected an object");
        auto& t = cfg.tolerances;
        const std::map<std::string, double*> slots{
            {"det_M", &t.det_M},
            {"ermakov_invariant", &t.ermakov_invariant},
            {"uncertainty_product", &t.uncertainty_product},
            {"p_phi", &t.p_phi},
            {"det_ermakov_identity", &t.det_ermakov_identity},
            {"lagrangian_residual", &t.lagrangian_residual},
            {"energy", &t.energy},
            {"frozen_width", &t.frozen_width},
            {"kernel_l2", &t.kernel_l2},
            {"oracle_l2", &t.oracle_l2},
            {"oracle_moments", &t.oracle_moments},
            {"wigner", &t.wigner}};
        for (const auto& [key, value] : v->items()) {
            auto it = slots.find(key);
            if (it == slots.end()) field_error("tolerances." + key, "unknown tolerance");
            if (!value.is_number() || !(value.get<double>() > 0.0)) field_error("tolerances." + key, "must be a positive number");
            *it->second = value.get<double>();
        }
    }

    if (const json* v = find(j, "output_dir")) {
        if (!v->is_string()) field_error("output_dir", "expected a string");
        cfg.output_dir = v->get<std::string>();
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ConfigError("config parse error at line " + std::to_string(line) + ": " + e.what());
    }
    return parse_config(j);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json config_to_json(const ScenarioConfig& cfg) {
    json tasks = json::array();
    for (Task t : cfg.tasks) tasks.push_back(to_string(t));
    json j{{"name", cfg.name},
           {"description", cfg.description},
           {"constants", {{"hbar", cfg.system.constants().hbar()}, {"mass", cfg.system.constants().mass()}}},
           {"system", law_to_json(cfg.system.frequency_law())},
           {"packet", {{"x0", cfg.packet.x0()}, {"p0", cfg.packet.p0()}, {"alpha0", cfg.packet.alpha0()}}},
           {"time", {{"t_end", cfg.t_end}, {"dt", cfg.dt}, {"sample_every", cfg.sample_every}}},
           {"grid", {{"x_min", cfg.x_min}, {"x_max", cfg.x_max}, {"n_points", cfg.n_points}}},
           {"phase_space_grid", {{"nx", cfg.wigner_nx}, {"np", cfg.wigner_np}, {"span_sigmas", cfg.span_sigmas}}},
           {"analysis_times", cfg.analysis_times},
           {"frozen_width_diagnostic", cfg.frozen_width_diagnostic},
           {"tasks", tasks},
           {"tolerance_profile", cfg.tolerance_profile},
           {"output_dir", cfg.output_dir.string()}};
    if (cfg.oracle_dt) j["oracle"] = {{"dt", *cfg.oracle_dt}};
    return j;
}

// ---------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------

namespace {

struct Builtin {
    const char* name;
    const char* json_text;
};

// Embedded so that acceptance tests and the CLI need no external files.
constexpr Builtin kBuiltins[] = {
    {"free-spread", R"({
  "name": "free-spread",
  "description": "Free Gaussian packet, alpha0 = 1, p0 = 1: width spreading, alpha^2 = alpha0^2 (1 + (t/alpha0^2)^2).",
  "system": {"type": "free"},
  "packet": {"x0": 0.0, "p0": 1.0, "alpha0": 1.0},
  "time": {"t_end": 10.0, "dt": 0.001, "sample_every": 100},
  "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 1024},
  "analysis_times": [0.0, 0.5, 1.0, 2.0],
  "tasks": ["evolve", "invariants", "wigner", "kernel_check", "oracle_compare"]
})"},
    {"ho-constant-width", R"({
  "name": "ho-constant-width",
  "description": "Harmonic oscillator omega = 1 with ground-state width alpha0 = 1/sqrt(omega): rigid rotation in phase space.",
  "system": {"type": "constant", "omega": 1.0},
  "packet": {"x0": 0.0, "p0": 1.0, "alpha0": 1.0},
  "time": {"t_end": 10.0, "dt": 0.001, "sample_every": 100},
  "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 1024},
  "analysis_times": [0.0, 0.5, 1.0, 2.0],
  "tasks": ["evolve", "invariants", "wigner", "kernel_check", "oracle_compare"]
})"},
    {"ho-breathing", R"({
  "name": "ho-breathing",
  "description": "Harmonic oscillator omega = 1 with alpha0 = 2 != 1/sqrt(omega): oscillating width.",
  "system": {"type": "constant", "omega": 1.0},
  "packet": {"x0": 0.0, "p0": 1.0, "alpha0": 2.0},
  "time": {"t_end": 10.0, "dt": 0.001, "sample_every": 100},
  "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 1024},
  "analysis_times": [0.0, 1.0],
  "tasks": ["evolve", "invariants", "wigner", "kernel_check", "oracle_compare"]
})"},
    {"omega-ramp", R"({
  "name": "omega-ramp",
  "description": "Driven oscillator with omega(t) = 0.5 + 0.1 t; energy is not conserved.",
  "system": {"type": "ramp", "omega0": 0.5, "slope": 0.1},
  "packet": {"x0": 0.0, "p0": 1.0, "alpha0": 1.0},
  "time": {"t_end": 10.0, "dt": 0.001, "sample_every": 100},
  "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 1024},
  "analysis_times": [0.0, 1.0],
  "tasks": ["evolve", "invariants", "wigner", "kernel_check", "oracle_compare"]
})"},
    {"omega-modulated", R"({
  "name": "omega-modulated",
  "description": "Parametrically modulated oscillator omega(t) = 1 + 0.3 cos(2 t).",
  "system": {"type": "modulated", "omega0": 1.0, "epsilon": 0.3, "gamma": 2.0},
  "packet": {"x0": 0.0, "p0": 1.0, "alpha0": 1.0},
  "time": {"t_end": 10.0, "dt": 0.001, "sample_every": 100},
  "grid": {"x_min": -20.0, "x_max": 20.0, "n_points": 1024},
  "analysis_times": [0.0, 1.0],
  "tasks": ["evolve", "invariants", "wigner", "kernel_check", "oracle_compare"]
})"},
    {"frozen-width-demo", R"({
  "name": "frozen-width-demo",
  "description": "Free motion with the width frozen at alpha0: det = 1 + (t/alpha0^2)^2, not a canonical map.",
  "system": {"type": "free"},
  "packet": {"x0": 0.0, "p0": 1.0, "alpha0": 1.0},
  "time": {"t_end": 4.0, "dt": 0.001, "sample_every": 100},
  "analysis_times": [0.0],
  "frozen_width_diagnostic": true,
  "tasks": ["evolve", "invariants"]
})"},
};

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    std::vector<std::string> names;
    for (const auto& b : kBuiltins) names.emplace_back(b.name);
    return names;
}

ScenarioConfig builtin_scenario(const std::string& name) {
    for (const auto& b : kBuiltins)
        if (name == b.name) return parse_config_text(b.json_text);
    throw ConfigError("unknown built-in scenario '" + name + "'");
}

std::string describe_scenario(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << cfg.name << "\n";
    if (!cfg.description.empty()) os << "  " << cfg.description << "\n";
    os << config_to_json(cfg).dump(2) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace {

struct Check {
    std::string name;
    double value;
    double tolerance;
    bool pass() const { return std::isfinite(value) && value <= tolerance; }
};

json checks_to_json(const std::vector<Check>& checks, bool& all_pass) {
    json out = json::object();
    for (const auto& c : checks) {
        out[c.name] = {{"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass()}};
        all_pass = all_pass && c.pass();
    }
    return out;
}

std::size_t index_of_time(const Trajectory& traj, double t) {
    auto it = std::lower_bound(traj.samples.begin(), traj.samples.end(), t - 1e-9,
                               [](const TrajectorySample& s, double v) { return s.lambda.t < v; });
    if (it == traj.samples.end() || std::abs(it->lambda.t - t) > 1e-9)
        throw ConfigError("analysis time " + std::to_string(t) + " is not on the integration grid");
    return static_cast<std::size_t>(it - traj.samples.begin());
}

json diagnostics_to_json(const GridDiagnostics& d) {
    return {{"coverage_warning", d.coverage_warning},
            {"aliasing_warning", d.aliasing_warning},
            {"outside_mass", d.outside_mass},
            {"notes", d.notes}};
}

json null_or(bool valid, double v) { return valid ? json(v) : json(nullptr); }

void run_invariants(ScenarioResults& r, std::vector<Check>& checks) {
    const auto& cfg = r.config;
    const auto& traj = r.trajectory;
    const auto& c = cfg.system.constants();
    const double hbar = c.hbar();
    const double a0 = cfg.packet.alpha0();
    const bool classical_form = cfg.packet.p0() != 0.0 && cfg.packet.x0() == 0.0;
    const bool conservative = cfg.system.has_constant_frequency();

    double det_drift = 0.0, il_drift = 0.0, product_err = 0.0, pphi_err = 0.0;
    double identity_err = 0.0, residual_max = 0.0, energy_drift = 0.0, ermakov_res = 0.0;
    const auto& s0 = traj[0];
    const double il0 = ermakov_invariant(s0.classical.eta, s0.classical.eta_dot, s0.lambda.alpha, s0.lambda.alpha_dot);
    const double e0 = energy_partition(s0.classical, s0.lambda, cfg.system).total();

    std::vector<bool> is_output(traj.size(), false);
    for (auto i : r.output_indices) is_output[i] = true;
    json samples = json::array();

    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& s = traj[i];
        const auto M = TransformMatrix::non_canonical(s.lambda.z_hat_dot(), -s.lambda.z_hat(), -s.lambda.u_hat_dot(),
                                                      s.lambda.u_hat(), a0, s.lambda.t);
        const double det = M.det();
        const double il = ermakov_invariant(s.classical.eta, s.classical.eta_dot, s.lambda.alpha, s.lambda.alpha_dot);
        const auto mom = moments_from_lambda(s.lambda, c);
        const double U = invariant_uncertainty_product(mom, c);
        const auto q = uncertainty_canonical(s.lambda, c);
        const double w = omega_at(cfg.system, s.lambda.t);
        const auto e = energy_partition(s.classical, s.lambda, cfg.system);
        const double er = ermakov_residual(s.lambda, w);

        det_drift = std::max(det_drift, std::abs(det - 1.0));
        il_drift = std::max(il_drift, il0 > 0.0 ? std::abs(il - il0) / il0 : std::abs(il - il0));
        product_err = std::max(product_err, std::abs(U / (0.25 * hbar * hbar) - 1.0));
        pphi_err = std::max(pphi_err, std::abs(q.p_phi / (0.5 * hbar) - 1.0));
        ermakov_res = std::max(ermakov_res, er);
        if (conservative && e0 > 0.0) energy_drift = std::max(energy_drift, std::abs(e.total() - e0) / e0);

        double det_ermakov = 0.0;
        if (classical_form) {
            det_ermakov = det_as_ermakov(s.classical.eta, s.classical.eta_dot, s.lambda.alpha, s.lambda.alpha_dot, a0,
                                         cfg.packet.p0(), c);
            const double k = c.mass() / (a0 * cfg.packet.p0());
            identity_err = std::max({identity_err, std::abs(det - 2.0 * k * k * il), std::abs(det_ermakov - det)});
        }
        UncertaintyResiduals res;
        // samples with two neighbours on each side get the five-point stencils
        const bool interior = i > 1 && i + 2 < traj.size();
        if (interior) {
            res = uncertainty_dynamics_residuals(traj, i);
            residual_max = std::max({residual_max, std::abs(res.lagrangian_res_phi), std::abs(res.lagrangian_res_alpha)});
        }

        if (is_output[i]) {
            samples.push_back({{"t", s.lambda.t},
                               {"det_M", det},
                               {"wronskian", s.lambda.wronskian()},
                               {"I_L", il},
                               {"det_as_ermakov", null_or(classical_form, det_ermakov)},
                               {"p_phi", q.p_phi},
                               {"p_alpha", q.p_alpha},
                               {"invariant_uncertainty_product", U},
                               {"uncertainty_product_canonical", uncertainty_product_canonical(q)},
                               {"E_cl", e.classical},
                               {"E_tilde", e.fluctuation},
                               {"E_total", e.total()},
                               {"H_tilde", uncertainty_hamiltonian(q, w, c)},
                               {"ermakov_residual", er},
                               {"lagrangian_res_phi", null_or(interior, res.lagrangian_res_phi)},
                               {"lagrangian_res_alpha", null_or(interior, res.lagrangian_res_alpha)}});
        }
    }

    const auto& tol = cfg.tolerances;
    std::vector<Check> local{{"det_M_drift", det_drift, tol.det_M},
                             {"I_L_relative_drift", il_drift, tol.ermakov_invariant},
                             {"uncertainty_product_relative_error", product_err, tol.uncertainty_product},
                             {"p_phi_relative_error", pphi_err, tol.p_phi},
                             {"ermakov_equation_residual", ermakov_res, tol.lagrangian_residual},
                             {"lagrangian_residual", residual_max, tol.lagrangian_residual}};
    if (classical_form) local.push_back({"det_ermakov_identity_error", identity_err, tol.det_ermakov_identity});
    if (conservative) local.push_back({"energy_relative_drift", energy_drift, tol.energy});
    checks.insert(checks.end(), local.begin(), local.end());

    r.report["samples"] = samples;
    r.report["I_L_initial"] = il0;
    if (classical_form)
        r.report["I_L_expected"] = 0.5 * std::pow(a0 * cfg.packet.p0() / c.mass(), 2);

    if (cfg.frozen_width_diagnostic) {
        if (!cfg.system.is_free()) throw CapabilityError("frozen_width_diagnostic requires a free system");
        json rows = json::array();
        double err = 0.0;
        for (auto i : r.output_indices) {
            const double t = traj[i].lambda.t;
            const auto M = frozen_width_matrix(cfg.system, a0, t);
            const double expected = 1.0 + std::pow(t / (a0 * a0), 2);
            err = std::max(err, std::abs(M.det() - expected));
            rows.push_back({{"t", t},
                            {"det", M.det()},
                            {"expected", expected},
                            {"matrix", {M.m11(), M.m12(), M.m21(), M.m22()}},
                            {"canonical", M.canonical()}});
        }
        r.report["frozen_width"] = {{"flag", "NON-CANONICAL"}, {"canonical", false}, {"samples", rows}};
        checks.push_back({"frozen_width_closed_form_error", err, tol.frozen_width});
    }
}

void run_wigner(ScenarioResults& r, std::vector<Check>& checks) {
    const auto& cfg = r.config;
    const auto& c = cfg.system.constants();
    const auto axis = cfg.wavefunction_axis();
    const auto w0 = wigner_gaussian(moments_from_lambda(r.trajectory[0].lambda, c), cfg.packet.x0(), cfg.packet.p0(), c);

    json out = json::array();
    for (std::size_t id = 0; id < cfg.analysis_times.size(); ++id) {
        const double t = cfg.analysis_times[id];
        const std::size_t idx = index_of_time(r.trajectory, t);
        const auto packet = propagate_analytic(r.trajectory, idx);
        const auto psi = evaluate_wavefunction(packet, axis);
        const auto mom = moments_from_lambda(r.trajectory[idx].lambda, c);
        const auto axes = phase_space_axes(mom, packet.mean_x, packet.mean_p, c, cfg.wigner_nx, cfg.wigner_np,
                                           cfg.span_sigmas);

        auto numeric = wigner_numeric(psi, axes.x, axes.p, c);
        const auto closed = sample_wigner(wigner_gaussian(mom, packet.mean_x, packet.mean_p, c), axes.x, axes.p);
        const auto M = matrix_from_state(r.trajectory[idx].lambda, cfg.packet.alpha0());
        const auto mapped = sample_wigner([&](double x, double p) { return wigner_pointmap(w0, M, x, p, c); },
                                          axes.x, axes.p);

        const auto mx = numeric.marginal_x();
        double marginal_x_err = 0.0;
        for (std::size_t i = 0; i < axes.x.count; ++i)
            marginal_x_err = std::max(marginal_x_err, std::abs(mx[i] - std::norm(packet(axes.x.at(i)))));
        const auto mp = numeric.marginal_p();
        const auto phi = momentum_amplitude(psi, axes.p, c);
        double marginal_p_err = 0.0;
        for (std::size_t j = 0; j < axes.p.count; ++j)
            marginal_p_err = std::max(marginal_p_err, std::abs(mp[j] - std::norm(phi.values[j])));

        const double vs_closed = numeric.max_abs_difference(closed);
        const double vs_map = numeric.max_abs_difference(mapped);
        const double norm_err = std::abs(numeric.integral() - 1.0);
        const std::string suffix = "_t" + std::to_string(id);
        checks.push_back({"wigner_numeric_vs_closed_form" + suffix, vs_closed, cfg.tolerances.wigner});
        checks.push_back({"wigner_numeric_vs_pointmap" + suffix, vs_map, cfg.tolerances.wigner});
        checks.push_back({"wigner_normalization" + suffix, norm_err, cfg.tolerances.wigner});
        checks.push_back({"wigner_marginal_x" + suffix, marginal_x_err, cfg.tolerances.wigner});
        checks.push_back({"wigner_marginal_p" + suffix, marginal_p_err, cfg.tolerances.wigner});

        out.push_back({{"id", id},
                       {"t", t},
                       {"file", "wigner_t" + std::to_string(id) + ".dat"},
                       {"max_abs_numeric_vs_closed_form", vs_closed},
                       {"max_abs_numeric_vs_pointmap", vs_map},
                       {"max_abs_closed_form_vs_pointmap", closed.max_abs_difference(mapped)},
                       {"normalization_error", norm_err},
                       {"marginal_x_error", marginal_x_err},
                       {"marginal_p_error", marginal_p_err},
                       {"min_value", numeric.min_value()},
                       {"peak_value", *std::max_element(numeric.values.begin(), numeric.values.end())},
                       {"diagnostics", diagnostics_to_json(numeric.diagnostics)}});
        r.wigner.push_back({id, t, std::move(numeric)});
    }
    r.report["wigner"] = out;
}

// kernel_check and oracle_compare share the propagated states at each analysis time
struct Propagated {
    double t;
    ComplexGrid analytic;
    std::optional<ComplexGrid> kernel;
};

// Near a zero of z the kernel chirp outgrows the grid and quadrature is meaningless.
void check_kernel_resolved(const TDKernelParams& k, const ScenarioConfig& cfg, double t) {
    const auto& c = cfg.system.constants();
    const auto axis = cfg.wavefunction_axis();
    const double reach = std::max(std::abs(axis.min), std::abs(axis.max()));
    const double support = std::abs(cfg.packet.x0()) + 8.0 * std::sqrt(validate_packet(cfg.packet, c).var_x);
    const double a0 = k.alpha0;
    const double chirp = c.mass() * (reach / a0 + std::abs(k.u_hat) * support / (a0 * a0)) / (c.hbar() * std::abs(k.z_hat));
    if (std::abs(k.z_hat) <= KernelCutoffs{}.z_min || chirp > std::numbers::pi / axis.step)
        throw DeltaLimitError("kernel_check at t = " + format_double(t) +
                              ": the kernel is too close to its delta-function limit to resolve on the grid");
}

void run_kernel_check(ScenarioResults& r, std::vector<Check>& checks, std::vector<Propagated>& states) {
    const auto& cfg = r.config;
    const auto& c = cfg.system.constants();
    const auto axis = cfg.wavefunction_axis();
    const auto psi0 = evaluate_wavefunction(initial_packet_state(cfg.packet, c), axis);

    json out = json::array();
    for (auto& st : states) {
        const std::size_t idx = index_of_time(r.trajectory, st.t);
        const auto fwd = td_kernel_params(r.trajectory, idx, KernelDirection::forward);
        check_kernel_resolved(fwd, cfg, st.t);
        auto inv = fwd;
        inv.direction = KernelDirection::inverse;

        auto out_state = apply_kernel([&](double x, double xp) { return kernel_td(fwd, x, xp, c); }, psi0, axis);
        const auto back = apply_kernel([&](double x, double xp) { return kernel_td(inv, x, xp, c); }, out_state, axis);
        const auto vs_analytic = compare_states({out_state, st.t}, {st.analytic, st.t}, c);
        const auto roundtrip = compare_states({back, 0.0}, {psi0, 0.0}, c);

        const auto sp = symplectic_params(fwd, c);
        const auto ode = satisfies_kernel_odes(sp, c);

        const std::string suffix = "_t" + format_double(st.t);
        checks.push_back({"kernel_vs_analytic_l2" + suffix, vs_analytic.l2_error, cfg.tolerances.kernel_l2});
        checks.push_back({"kernel_roundtrip_l2" + suffix, roundtrip.l2_error, cfg.tolerances.kernel_l2});
        checks.push_back({"kernel_ode_residual" + suffix, std::max(ode.first, ode.second), cfg.tolerances.kernel_l2});
        out.push_back({{"t", st.t},
                       {"maslov_index", fwd.maslov_index},
                       {"l2_vs_analytic", vs_analytic.l2_error},
                       {"phase_aligned_l2_vs_analytic", vs_analytic.phase_aligned_l2_error},
                       {"roundtrip_l2", roundtrip.l2_error},
                       {"norm_out", std::sqrt(out_state.norm_squared())},
                       {"ode_residual_first", ode.first},
                       {"ode_residual_second", ode.second},
                       {"diagnostics", diagnostics_to_json(out_state.diagnostics)}});
        st.kernel = std::move(out_state);
    }
    r.report["kernel_check"] = out;
}

void run_oracle(ScenarioResults& r, std::vector<Check>& checks, const std::vector<Propagated>& states) {
    const auto& cfg = r.config;
    const auto& c = cfg.system.constants();
    const double odt = cfg.oracle_dt.value_or(cfg.dt);
    GridState current{evaluate_wavefunction(initial_packet_state(cfg.packet, c), cfg.wavefunction_axis()), 0.0};

    json out = json::array();
    for (const auto& st : states) {
        const long total = std::lround(st.t / odt);
        const long done = std::lround(current.t / odt);
        current = split_step(current, cfg.system, odt, total - done);
        current.t = st.t;

        const auto vs_analytic = compare_states(current, {st.analytic, st.t}, c);
        const auto q = grid_moments(current.grid, c);
        const auto ml = moments_from_lambda(r.trajectory[index_of_time(r.trajectory, st.t)].lambda, c);
        const double lambda_moment_err =
            std::max({std::abs(q.var_x - ml.var_x), std::abs(q.var_p - ml.var_p), std::abs(q.corr - ml.corr)});

        const std::string suffix = "_t" + format_double(st.t);
        checks.push_back({"oracle_vs_analytic_l2" + suffix, vs_analytic.phase_aligned_l2_error, cfg.tolerances.oracle_l2});
        checks.push_back({"oracle_moments" + suffix, std::max(vs_analytic.moment_errors.max(), lambda_moment_err),
                          cfg.tolerances.oracle_moments});
        json entry{{"t", st.t},
                   {"dt", odt},
                   {"steps", total},
                   {"l2_error", vs_analytic.l2_error},
                   {"phase_aligned_l2_error", vs_analytic.phase_aligned_l2_error},
                   {"moment_errors",
                    {{"mean_x", vs_analytic.moment_errors.mean_x},
                     {"mean_p", vs_analytic.moment_errors.mean_p},
                     {"var_x", vs_analytic.moment_errors.var_x},
                     {"var_p", vs_analytic.moment_errors.var_p},
                     {"corr", vs_analytic.moment_errors.corr}}},
                   {"max_moment_error_vs_lambda", lambda_moment_err},
                   {"diagnostics", diagnostics_to_json(current.grid.diagnostics)}};
        if (st.kernel) {
            const auto vs_kernel = compare_states(current, {*st.kernel, st.t}, c);
            entry["phase_aligned_l2_vs_kernel"] = vs_kernel.phase_aligned_l2_error;
            checks.push_back({"oracle_vs_kernel_l2" + suffix, vs_kernel.phase_aligned_l2_error, cfg.tolerances.oracle_l2});
        }
        out.push_back(entry);
    }
    r.report["oracle_compare"] = out;
}

}  // namespace

ScenarioResults run_scenario(const ScenarioConfig& config) {
    config.validate();
    ScenarioResults r{config, solve_lambda(config.system, config.packet, sample_times(config.t_end, config.dt, 1),
                                           IntegratorOptions{config.dt}),
                      {}, {}, {}, json::object(), true};
    const auto& traj = r.trajectory;
    const auto& c = config.system.constants();

    for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(config.sample_every))
        r.output_indices.push_back(i);
    if (r.output_indices.back() != traj.size() - 1) r.output_indices.push_back(traj.size() - 1);

    for (auto i : r.output_indices) {
        const auto& s = traj[i];
        const auto mom = moments_from_lambda(s.lambda, c);
        const auto e = energy_partition(s.classical, s.lambda, config.system);
        r.rows.push_back({s.lambda.t, s.classical.eta, s.classical.eta_dot, s.lambda.alpha, s.lambda.alpha_dot,
                          s.lambda.phi, mom.var_x, mom.var_p, mom.corr,
                          s.lambda.z_hat_dot() * s.lambda.u_hat() - s.lambda.u_hat_dot() * s.lambda.z_hat(),
                          ermakov_invariant(s.classical.eta, s.classical.eta_dot, s.lambda.alpha, s.lambda.alpha_dot),
                          uncertainty_canonical(s.lambda, c).p_phi, e.classical, e.fluctuation});
    }

    r.report["scenario"] = config.name;
    r.report["config"] = config_to_json(config);
    std::vector<Check> checks;
    if (config.has_task(Task::invariants)) run_invariants(r, checks);
    if (config.has_task(Task::wigner)) run_wigner(r, checks);

    if (config.has_task(Task::kernel_check) || config.has_task(Task::oracle_compare)) {
        std::vector<Propagated> states;
        for (double t : config.analysis_times) {
            if (t == 0.0) continue;  // the kernel is a delta function at t = 0
            states.push_back({t, evaluate_wavefunction(propagate_analytic(traj, index_of_time(traj, t)),
                                                       config.wavefunction_axis()),
                              std::nullopt});
        }
        std::sort(states.begin(), states.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
        if (config.has_task(Task::kernel_check)) run_kernel_check(r, checks, states);
        if (config.has_task(Task::oracle_compare)) run_oracle(r, checks, states);
    }

    bool pass = true;
    r.report["summary"] = {{"checks", checks_to_json(checks, pass)}};
    r.report["summary"]["pass"] = pass;
    r.passed = pass;
    return r;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::string trajectory_csv(const ScenarioResults& results) {
    std::string out = "t,eta,eta_dot,alpha,alpha_dot,phi,var_x,var_p,corr,det_M,I_L,p_phi,E_cl,E_tilde\n";
    for (const auto& row : results.rows) {
        const double fields[] = {row.t,     row.eta,   row.eta_dot, row.alpha, row.alpha_dot, row.phi,  row.var_x,
                                 row.var_p, row.corr, row.det_M,   row.I_L,   row.p_phi,     row.E_cl, row.E_tilde};
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i) out += ',';
            out += format_double(fields[i]);
        }
        out += '\n';
    }
    return out;
}

std::string wigner_dat(const WignerOutput& w) {
    const auto& g = w.grid;
    std::string out;
    out += "# Wigner function W(x,p), rows = p index, columns = x index\n";
    out += "# t = " + format_double(w.t) + "\n";
    out += "# x_min = " + format_double(g.x.min) + "\n";
    out += "# dx = " + format_double(g.x.step) + "\n";
    out += "# nx = " + std::to_string(g.x.count) + "\n";
    out += "# p_min = " + format_double(g.p.min) + "\n";
    out += "# dp = " + format_double(g.p.step) + "\n";
    out += "# np = " + std::to_string(g.p.count) + "\n";
    for (std::size_t ip = 0; ip < g.p.count; ++ip) {
        for (std::size_t ix = 0; ix < g.x.count; ++ix) {
            if (ix) out += ' ';
            out += format_double(g.at(ip, ix));
        }
        out += '\n';
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void emit_outputs(const ScenarioResults& results, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    if (results.config.has_task(Task::evolve)) write_file(dir / "trajectory.csv", trajectory_csv(results));
    for (const auto& w : results.wigner) write_file(dir / ("wigner_t" + std::to_string(w.id) + ".dat"), wigner_dat(w));
    write_file(dir / "report.json", results.report.dump(2) + "\n");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return exit_code::config;
    if (dynamic_cast<const DivergenceError*>(&e)) return exit_code::divergence;
    if (dynamic_cast<const CapabilityError*>(&e)) return exit_code::capability;
    if (dynamic_cast<const IoError*>(&e)) return exit_code::io;
    if (dynamic_cast<const ResolutionError*>(&e)) return exit_code::resolution;
    if (dynamic_cast<const RangeError*>(&e)) return exit_code::config;
    return exit_code::validation;
}

}  // namespace wpdyn

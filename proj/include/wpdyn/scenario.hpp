#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wpdyn/core.hpp"
#include "wpdyn/evolution.hpp"
#include "wpdyn/grid.hpp"

namespace wpdyn {

enum class Task { evolve, wigner, kernel_check, invariants, oracle_compare };

std::string to_string(Task task);

struct Tolerances {
    double det_M = 1e-9;
    double ermakov_invariant = 1e-8;
    double uncertainty_product = 1e-10;
    double p_phi = 1e-10;
    double det_ermakov_identity = 1e-9;
    double lagrangian_residual = 1e-6;
    double energy = 1e-9;
    double frozen_width = 1e-12;
    double kernel_l2 = 1e-5;
    double oracle_l2 = 1e-5;
    double oracle_moments = 1e-6;
    double wigner = 1e-5;

    /// "default" or "strict" (ten times tighter, residuals excepted).
    static Tolerances profile(const std::string& name);
};

struct ScenarioConfig {
    std::string name = "custom";
    std::string description;
    SystemSpec system;
    InitialPacket packet{0.0, 1.0, 1.0};
    double t_end = 1.0;
    double dt = 1e-3;
    int sample_every = 100;
    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t n_points = 1024;
    std::size_t wigner_nx = 256;
    std::size_t wigner_np = 256;
    double span_sigmas = 8.0;
    /// Times used by the wigner, kernel_check and oracle_compare tasks.
    std::vector<double> analysis_times{0.0, 1.0};
    /// Split-operator step; defaults to dt.
    std::optional<double> oracle_dt;
    bool frozen_width_diagnostic = false;
    std::vector<Task> tasks{Task::evolve, Task::invariants};
    std::string tolerance_profile = "default";
    Tolerances tolerances;
    std::filesystem::path output_dir = "out";

    /// Periodic wavefunction grid x_i = x_min + i (x_max - x_min)/n_points, i < n_points.
    UniformAxis wavefunction_axis() const;
    bool has_task(Task task) const;
    /// Throws ConfigError on inconsistent values.
    void validate() const;
};

/// Parses the JSON config. Errors carry the offending field path or line number.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& config);

std::vector<std::string> builtin_scenario_names();
/// Throws ConfigError for unknown names.
ScenarioConfig builtin_scenario(const std::string& name);
std::string describe_scenario(const ScenarioConfig& config);

/// One trajectory.csv row.
struct TrajectoryRow {
    double t, eta, eta_dot, alpha, alpha_dot, phi, var_x, var_p, corr, det_M, I_L, p_phi, E_cl, E_tilde;
};

struct WignerOutput {
    std::size_t id = 0;
    double t = 0.0;
    PhaseSpaceGrid grid;
};

struct ScenarioResults {
    ScenarioConfig config;
    Trajectory trajectory;
    std::vector<std::size_t> output_indices;
    std::vector<TrajectoryRow> rows;
    std::vector<WignerOutput> wigner;
    /// The invariant report (per-sample records, summary, task sections).
    nlohmann::json report;
    bool passed = true;
};

ScenarioResults run_scenario(const ScenarioConfig& config);

/// Writes trajectory.csv, wigner_t<id>.dat and report.json into `dir`. Throws IoError.
void emit_outputs(const ScenarioResults& results, const std::filesystem::path& dir);

std::string format_double(double v);
std::string trajectory_csv(const ScenarioResults& results);
std::string wigner_dat(const WignerOutput& w);

/// Process exit codes of the command-line runner.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int checks_failed = 1;
inline constexpr int config = 2;
inline constexpr int divergence = 3;
inline constexpr int capability = 4;
inline constexpr int io = 5;
inline constexpr int resolution = 6;
inline constexpr int validation = 7;
}  // namespace exit_code

int exit_code_for(const std::exception& e);

}  // namespace wpdyn

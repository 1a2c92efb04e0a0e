#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/scenario.hpp"

namespace {

constexpr const char* kExitCodes = R"(Exit codes:
  0  success, all checks passed
  1  run completed but one or more checks failed
  2  configuration error
  3  numerical divergence
  4  capability error (unsupported operation, kernel delta limit)
  5  I/O error
  6  grid resolution error
  7  validation error)";

wpdyn::ScenarioConfig resolve(const std::string& what) {
    if (std::filesystem::exists(what)) return wpdyn::load_config(what);
    for (const auto& name : wpdyn::builtin_scenario_names())
        if (name == what) return wpdyn::builtin_scenario(name);
    throw wpdyn::ConfigError("'" + what + "' is neither a config file nor a built-in scenario");
}

void print_summary(const wpdyn::ScenarioResults& r) {
    const auto& checks = r.report["summary"]["checks"];
    for (const auto& [name, c] : checks.items())
        std::cout << (c["pass"].get<bool>() ? "  ok    " : "  FAIL  ") << name << " = "
                  << wpdyn::format_double(c["value"].get<double>())
                  << " (tol " << wpdyn::format_double(c["tolerance"].get<double>()) << ")\n";
    std::cout << r.config.name << ": " << (r.passed ? "all checks passed" : "checks FAILED") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian wave-packet dynamics under quadratic Hamiltonians"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    std::string target;
    std::string output_dir;
    std::string profile;
    auto* run = app.add_subcommand("run", "Run a scenario from a JSON config file or built-in name");
    run->add_option("scenario", target, "Config path or built-in scenario name")->required();
    run->add_option("--output-dir", output_dir, "Directory for trajectory.csv, wigner_t<id>.dat, report.json");
    run->add_option("--tolerance-profile", profile, "Tolerance profile")
        ->check(CLI::IsMember({"strict", "default"}));

    auto* list = app.add_subcommand("list-scenarios", "List built-in scenarios");

    std::string describe_name;
    auto* describe = app.add_subcommand("describe", "Print a scenario's configuration");
    describe->add_option("scenario", describe_name, "Config path or built-in scenario name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : wpdyn::exit_code::config;
    }

    try {
        if (*list) {
            for (const auto& name : wpdyn::builtin_scenario_names())
                std::cout << name << "  " << wpdyn::builtin_scenario(name).description << "\n";
            return wpdyn::exit_code::ok;
        }
        if (*describe) {
            std::cout << wpdyn::describe_scenario(resolve(describe_name));
            return wpdyn::exit_code::ok;
        }
        auto config = resolve(target);
        if (!profile.empty()) {
            config.tolerance_profile = profile;
            config.tolerances = wpdyn::Tolerances::profile(profile);
        }
        if (!output_dir.empty()) config.output_dir = output_dir;
        const auto results = wpdyn::run_scenario(config);
        wpdyn::emit_outputs(results, config.output_dir);
        print_summary(results);
        std::cout << "outputs written to " << config.output_dir.string() << "\n";
        return results.passed ? wpdyn::exit_code::ok : wpdyn::exit_code::checks_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wpdyn::exit_code_for(e);
    }
}

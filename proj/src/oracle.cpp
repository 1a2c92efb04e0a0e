#include "wpdyn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "wpdyn/errors.hpp"

namespace wpdyn {

namespace {

constexpr double kNyquistLimit = 1e-10;
constexpr double kCentralMassLimit = 1e-10;

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

double signed_wavenumber(std::size_t j, std::size_t n, double dk) {
    const auto sj = static_cast<std::ptrdiff_t>(j);
    const auto sn = static_cast<std::ptrdiff_t>(n);
    return static_cast<double>(j < n / 2 ? sj : sj - sn) * dk;
}

void check_resolution(const ComplexGrid& grid, detail::FftPlan& plan) {
    std::vector<cplx> spectrum = grid.values;
    plan.forward(spectrum);
    const std::size_t n = spectrum.size();
    double total = 0.0, outer = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = std::norm(spectrum[j]);
        total += w;
        // |k| beyond half of the Nyquist wavenumber
        if (j >= n / 4 && j < n - n / 4) outer += w;
    }
    if (total > 0.0 && outer / total > kNyquistLimit)
        throw ResolutionError("split_step: momentum content reaches the grid Nyquist band (" +
                              std::to_string(outer / total) + " of the weight)");
}

void check_coverage(ComplexGrid& grid) {
    const std::size_t n = grid.size();
    double total = 0.0, central = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = std::norm(grid.values[i]);
        total += rho;
        if (i >= n / 4 && i < n - n / 4) central += rho;
    }
    const double outside = total > 0.0 ? 1.0 - central / total : 0.0;
    if (outside > kCentralMassLimit) {
        grid.diagnostics.coverage_warning = true;
        grid.diagnostics.outside_mass = std::max(grid.diagnostics.outside_mass, outside);
        grid.diagnostics.notes.push_back("oracle state has " + std::to_string(outside) +
                                         " of its mass outside the central half of the domain");
    }
}

}  // namespace

GridState split_step(const GridState& state, const SystemSpec& system, double dt, long steps) {
    if (steps < 0) throw ConfigError("split_step: negative step count");
    if (steps == 0) return state;
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("split_step: dt must be positive");
    const std::size_t n = state.grid.size();
    if (!is_power_of_two(n)) throw ConfigError("split_step: grid size must be a power of two");

    const double hbar = system.constants().hbar();
    const double m = system.constants().mass();
    detail::FftPlan plan(n);
    check_resolution(state.grid, plan);

    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * state.grid.dx);
    std::vector<cplx> kinetic(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = signed_wavenumber(j, n, dk);
        // backward transform is unnormalized; fold 1/n into the kinetic factor
        kinetic[j] = std::polar(1.0 / static_cast<double>(n), -hbar * k * k * dt / (2.0 * m));
    }

    std::vector<double> x2(n);
    for (std::size_t i = 0; i < n; ++i) x2[i] = state.grid.x(i) * state.grid.x(i);

    std::vector<cplx> psi = state.grid.values;
    std::vector<cplx> half_potential(n);
    double t = state.t;
    for (long s = 0; s < steps; ++s) {
        const double w = omega_at(system, t + 0.5 * dt);
        const double c = 0.5 * m * w * w * dt / (2.0 * hbar);
        for (std::size_t i = 0; i < n; ++i) half_potential[i] = std::polar(1.0, -c * x2[i]);

        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_potential[i];
        plan.forward(psi);
        for (std::size_t j = 0; j < n; ++j) psi[j] *= kinetic[j];
        plan.backward(psi);
        for (std::size_t i = 0; i < n; ++i) psi[i] *= half_potential[i];

        t = state.t + static_cast<double>(s + 1) * dt;
        for (const auto& v : psi)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw DivergenceError("split_step: non-finite wavefunction at t = " + std::to_string(t), t);
    }

    GridState out{ComplexGrid(state.grid.x_min, state.grid.dx, std::move(psi)), t};
    out.grid.diagnostics = state.grid.diagnostics;
    check_coverage(out.grid);
    return out;
}

double MomentErrors::max() const noexcept {
    return std::max({mean_x, mean_p, var_x, var_p, corr});
}

StateComparison compare_states(const GridState& a, const GridState& b, const Constants& c) {
    if (!a.grid.same_axis(b.grid)) throw ValidationError("compare_states: grid mismatch");
    const double dx = a.grid.dx;
    StateComparison r;
    const cplx overlap = inner_product(b.grid, a.grid);
    const cplx rot = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0, 0.0);
    double raw = 0.0, aligned = 0.0;
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
        raw += std::norm(a.grid.values[i] - b.grid.values[i]);
        aligned += std::norm(a.grid.values[i] - rot * b.grid.values[i]);
    }
    r.l2_error = std::sqrt(raw * dx);
    r.phase_aligned_l2_error = std::sqrt(aligned * dx);

    const auto ma = grid_moments(a.grid, c);
    const auto mb = grid_moments(b.grid, c);
    r.moment_errors = {std::abs(ma.mean_x - mb.mean_x), std::abs(ma.mean_p - mb.mean_p),
                       std::abs(ma.var_x - mb.var_x), std::abs(ma.var_p - mb.var_p),
                       std::abs(ma.corr - mb.corr)};
    return r;
}

}  // namespace wpdyn

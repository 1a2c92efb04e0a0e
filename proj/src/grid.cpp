#include "wpdyn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "wpdyn/errors.hpp"

namespace wpdyn {

void GridDiagnostics::merge(const GridDiagnostics& other) {
    coverage_warning = coverage_warning || other.coverage_warning;
    aliasing_warning = aliasing_warning || other.aliasing_warning;
    outside_mass = std::max(outside_mass, other.outside_mass);
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

UniformAxis UniformAxis::closed(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw ConfigError("axis needs n >= 2 and hi > lo");
    return {lo, (hi - lo) / static_cast<double>(n - 1), n};
}

UniformAxis UniformAxis::centred(double centre, double half_width, std::size_t n) {
    if (n < 2 || !(half_width > 0.0)) throw ConfigError("axis needs n >= 2 and positive width");
    const double step = 2.0 * half_width / static_cast<double>(n);
    return {centre - step * static_cast<double>(n / 2), step, n};
}

ComplexGrid::ComplexGrid(double x_min_, double dx_, std::vector<cplx> values_)
    : x_min(x_min_), dx(dx_), values(std::move(values_)) {
    if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x_min))
        throw ValidationError("ComplexGrid: dx must be positive and finite");
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError("ComplexGrid: non-finite sample");
}

ComplexGrid::ComplexGrid(const UniformAxis& axis, std::vector<cplx> values_)
    : ComplexGrid(axis.min, axis.step, std::move(values_)) {}

double ComplexGrid::norm_squared() const {
    // Trapezoid; end points carry half weight.
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = (i == 0 || i + 1 == values.size()) ? 0.5 : 1.0;
        s += w * std::norm(values[i]);
    }
    return s * dx;
}

cplx ComplexGrid::interpolate(double xq) const {
    const auto n = static_cast<std::ptrdiff_t>(values.size());
    const double u = (xq - x_min) / dx;
    if (u < 0.0 || u > static_cast<double>(n - 1)) return {0.0, 0.0};
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    const double f = u - static_cast<double>(i);
    if (f == 0.0) return values[static_cast<std::size_t>(i)];
    // 4-point stencil i-1..i+2, shifted inward at the edges
    std::ptrdiff_t s = std::clamp<std::ptrdiff_t>(i - 1, 0, std::max<std::ptrdiff_t>(n - 4, 0));
    const double t = u - static_cast<double>(s);
    const double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    const double l1 = t * (t - 2) * (t - 3) / 2.0;
    const double l2 = -t * (t - 1) * (t - 3) / 2.0;
    const double l3 = t * (t - 1) * (t - 2) / 6.0;
    const auto at = [&](std::ptrdiff_t k) {
        return k < n ? values[static_cast<std::size_t>(k)] : cplx{};
    };
    return l0 * at(s) + l1 * at(s + 1) + l2 * at(s + 2) + l3 * at(s + 3);
}

bool ComplexGrid::same_axis(const ComplexGrid& other, double rel_tol) const {
    if (values.size() != other.values.size()) return false;
    const double scale = std::max({std::abs(dx), std::abs(x_min), 1.0});
    return std::abs(dx - other.dx) <= rel_tol * scale &&
           std::abs(x_min - other.x_min) <= rel_tol * scale;
}

PhaseSpaceGrid::PhaseSpaceGrid(UniformAxis x_axis, UniformAxis p_axis)
    : x(x_axis), p(p_axis), values(x_axis.count * p_axis.count, 0.0) {
    if (!(x.step > 0.0) || !(p.step > 0.0))
        throw ValidationError("PhaseSpaceGrid: steps must be positive");
}

double PhaseSpaceGrid::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * x.step * p.step;
}

std::vector<double> PhaseSpaceGrid::marginal_x() const {
    std::vector<double> out(x.count, 0.0);
    for (std::size_t ip = 0; ip < p.count; ++ip)
        for (std::size_t ix = 0; ix < x.count; ++ix) out[ix] += at(ip, ix) * p.step;
    return out;
}

std::vector<double> PhaseSpaceGrid::marginal_p() const {
    std::vector<double> out(p.count, 0.0);
    for (std::size_t ip = 0; ip < p.count; ++ip)
        for (std::size_t ix = 0; ix < x.count; ++ix) out[ip] += at(ip, ix) * x.step;
    return out;
}

double PhaseSpaceGrid::min_value() const {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

double PhaseSpaceGrid::max_abs_difference(const PhaseSpaceGrid& other) const {
    if (values.size() != other.values.size())
        throw ValidationError("PhaseSpaceGrid: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        m = std::max(m, std::abs(values[i] - other.values[i]));
    return m;
}

GridMoments grid_moments(const ComplexGrid& psi, const Constants& c) {
    const std::size_t n = psi.size();
    GridMoments m;
    if (n == 0) return m;

    // d/dx psi via the discrete Fourier transform
    std::vector<cplx> dpsi = psi.values;
    {
        detail::FftPlan plan(n);
        plan.forward(dpsi);
        const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * psi.dx);
        for (std::size_t j = 0; j < n; ++j) {
            const auto signed_j = static_cast<double>(j < (n + 1) / 2 ? static_cast<std::ptrdiff_t>(j)
                                                                      : static_cast<std::ptrdiff_t>(j) -
                                                                            static_cast<std::ptrdiff_t>(n));
            // Nyquist bin of an even grid has no consistent derivative
            const double k = (n % 2 == 0 && j == n / 2) ? 0.0 : signed_j * dk;
            dpsi[j] *= cplx(0.0, k);
        }
        plan.backward(dpsi);
        for (auto& v : dpsi) v /= static_cast<double>(n);
    }

    double norm = 0.0, sx = 0.0, sxx = 0.0, spp = 0.0;
    cplx sp{}, sxp{};
    const double hbar = c.hbar();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = psi.x(i);
        const double rho = std::norm(psi.values[i]);
        norm += rho;
        sx += x * rho;
        sxx += x * x * rho;
        // p psi = -i hbar psi'
        const cplx ppsi = cplx(0.0, -hbar) * dpsi[i];
        sp += std::conj(psi.values[i]) * ppsi;
        sxp += std::conj(psi.values[i]) * x * ppsi;
        spp += std::norm(ppsi);
    }
    norm *= psi.dx;
    m.norm = norm;
    m.mean_x = sx * psi.dx / norm;
    m.mean_p = sp.real() * psi.dx / norm;
    m.var_x = sxx * psi.dx / norm - m.mean_x * m.mean_x;
    m.var_p = spp * psi.dx / norm - m.mean_p * m.mean_p;
    m.corr = 2.0 * sxp.real() * psi.dx / norm - 2.0 * m.mean_x * m.mean_p;
    return m;
}

cplx inner_product(const ComplexGrid& a, const ComplexGrid& b) {
    if (!a.same_axis(b)) throw ValidationError("inner_product: grid mismatch");
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.values[i]) * b.values[i];
    return s * a.dx;
}

double edge_mass(const ComplexGrid& psi, double edge_fraction) {
    const std::size_t n = psi.size();
    if (n == 0) return 0.0;
    const auto band = static_cast<std::size_t>(std::ceil(edge_fraction * static_cast<double>(n)));
    double edge = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = std::norm(psi.values[i]);
        total += rho;
        if (i < band || i + band >= n) edge += rho;
    }
    return total > 0.0 ? edge / total : 0.0;
}

}  // namespace wpdyn

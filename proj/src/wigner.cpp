#include "wpdyn/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wpdyn/errors.hpp"
#include "wpdyn/kernels.hpp"

namespace wpdyn {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

ScaledPhasePoint map_to_initial(const TransformMatrix& mat, double x, double p, const Constants& c) {
    const double v = p / c.mass();
    const double xi = mat.m11() * x + mat.m12() * v;
    const double scaled_p = mat.m21() * x + mat.m22() * v;  // alpha0 p' / m
    return {xi, -scaled_p};
}

PhaseSpaceGrid wigner_numeric(const ComplexGrid& psi, const UniformAxis& x_axis,
                              const UniformAxis& p_axis, const Constants& c) {
    const double hbar = c.hbar();
    const double dy = psi.dx;
    const double x_lo = psi.x_min;
    const double x_hi = psi.x(psi.size() - 1);

    PhaseSpaceGrid w(x_axis, p_axis);
    w.diagnostics = psi.diagnostics;
    const double p_nyquist = kPi * hbar / dy;
    if (std::max(std::abs(p_axis.min), std::abs(p_axis.max())) > p_nyquist) {
        w.diagnostics.aliasing_warning = true;
        w.diagnostics.notes.push_back("p axis exceeds the Nyquist momentum " + std::to_string(p_nyquist) +
                                      " of the wavefunction grid");
    }

    std::vector<cplx> rotation(p_axis.count);
    for (std::size_t j = 0; j < p_axis.count; ++j)
        rotation[j] = std::polar(1.0, p_axis.at(j) * dy / hbar);

    std::vector<cplx> f;
    for (std::size_t ix = 0; ix < x_axis.count; ++ix) {
        const double x = x_axis.at(ix);
        // largest k with both x +- k dy/2 inside the grid
        const double reach = std::min(x - x_lo, x_hi - x);
        f.clear();
        if (reach >= 0.0) {
            const auto kmax = static_cast<std::size_t>(std::floor(2.0 * reach / dy + 1e-9));
            f.resize(kmax + 1);
            for (std::size_t k = 0; k <= kmax; ++k) {
                const double half = 0.5 * static_cast<double>(k) * dy;
                f[k] = std::conj(psi.interpolate(x + half)) * psi.interpolate(x - half);
            }
        }
        for (std::size_t j = 0; j < p_axis.count; ++j) {
            double value = 0.0;
            if (!f.empty()) {
                // Horner evaluation of sum_{k>=1} f_k z^k
                cplx acc{};
                for (std::size_t k = f.size() - 1; k >= 1; --k) acc = (acc + f[k]) * rotation[j];
                value = (f[0].real() + 2.0 * acc.real()) * dy / (2.0 * kPi * hbar);
            }
            w.at(j, ix) = value;
        }
    }
    return w;
}

WignerFn wigner_gaussian(const Moments& m, double mean_x, double mean_p, const Constants& c) {
    const double hbar = c.hbar();
    const double target = 0.25 * hbar * hbar;
    const double product = m.var_x * m.var_p - 0.25 * m.corr * m.corr;
    if (!(std::abs(product - target) <= 1e-6 * target))
        throw ValidationError("wigner_gaussian: var_x var_p - corr^2/4 = " + std::to_string(product) +
                              ", expected hbar^2/4");
    const double scale = 2.0 / (hbar * hbar);
    const double norm = 1.0 / (kPi * hbar);
    return [=](double x, double p) {
        const double dx = x - mean_x;
        const double dp = p - mean_p;
        return norm * std::exp(-scale * (m.var_p * dx * dx - m.corr * dx * dp + m.var_x * dp * dp));
    };
}

double wigner_pointmap(const WignerFn& w0, const TransformMatrix& mat, double x, double p,
                       const Constants& c) {
    if (!mat.canonical())
        throw ValidationError("wigner_pointmap: matrix is tagged non-canonical");
    if (!(std::abs(mat.det() - 1.0) <= 1e-9))
        throw ValidationError("wigner_pointmap: det = " + std::to_string(mat.det()) + ", expected 1");
    const auto q = map_to_initial(mat, x, p, c);
    return w0(q.x_prime(mat.alpha0()), q.p_prime(mat.alpha0(), c.mass()));
}

PhaseSpaceGrid sample_wigner(const WignerFn& w, const UniformAxis& x_axis, const UniformAxis& p_axis) {
    PhaseSpaceGrid g(x_axis, p_axis);
    for (std::size_t j = 0; j < p_axis.count; ++j)
        for (std::size_t i = 0; i < x_axis.count; ++i) g.at(j, i) = w(x_axis.at(i), p_axis.at(j));
    return g;
}

PhaseSpaceAxes phase_space_axes(const Moments& m, double mean_x, double mean_p, const Constants&,
                                std::size_t nx, std::size_t np, double span_sigmas) {
    return {UniformAxis::centred(mean_x, span_sigmas * std::sqrt(m.var_x), nx),
            UniformAxis::centred(mean_p, span_sigmas * std::sqrt(m.var_p), np)};
}

ComplexGrid momentum_amplitude(const ComplexGrid& psi, const UniformAxis& p_axis, const Constants& c) {
    const SymplecticParams fourier{0.0, -1.0, 1.0, 0.0};
    return apply_kernel([&](double p, double x) { return kernel_ti(fourier, p, x, c); }, psi, p_axis);
}

}  // namespace wpdyn

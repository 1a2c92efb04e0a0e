#pragma once

#include <functional>

#include "wpdyn/grid.hpp"
#include "wpdyn/invariants.hpp"
#include "wpdyn/packet.hpp"

namespace wpdyn {

using WignerFn = std::function<double(double x, double p)>;

/// Scaled initial phase-space point attached to (x, p) at time t by the transformation matrix.
/// The momentum slot keeps the sign of the scaled column vector, pi = -alpha0 p'/m; use the
/// accessors for physical coordinates.
struct ScaledPhasePoint {
    double xi = 0.0;
    double pi = 0.0;

    double x_prime(double alpha0) const noexcept { return alpha0 * xi; }
    double p_prime(double alpha0, double mass) const noexcept { return -mass * pi / alpha0; }
};

/// Backward point map of (x, p) at time t onto the initial phase space.
/// x'/alpha0 = z' x - z p/m,  alpha0 p'/m = u p/m - u' x.
ScaledPhasePoint map_to_initial(const TransformMatrix& matrix, double x, double p, const Constants& c);

/// W(x,p) = (1/2 pi hbar) int dy e^{ipy/hbar} psi*(x + y/2) psi(x - y/2).
/// The y integral is a trapezoid sum with step psi.dx; off-node samples use cubic
/// interpolation. Sets the aliasing warning if the p axis reaches beyond pi hbar / dx.
PhaseSpaceGrid wigner_numeric(const ComplexGrid& psi, const UniformAxis& x_axis,
                              const UniformAxis& p_axis, const Constants& c);

/// Closed-form Wigner function of a Gaussian with the given second moments:
/// (1/pi hbar) exp{-(2/hbar^2)[var_p x~^2 - corr x~ p~ + var_x p~^2]}.
/// Throws ValidationError if var_x var_p - corr^2/4 differs from hbar^2/4 by more than 1e-6.
WignerFn wigner_gaussian(const Moments& moments, double mean_x, double mean_p, const Constants& c);

/// W(x, p, t) = W0(x', p') with (x', p') the initial point mapped by `matrix`.
/// Rejects non-canonical matrices and |det - 1| > 1e-9.
double wigner_pointmap(const WignerFn& w0, const TransformMatrix& matrix, double x, double p,
                       const Constants& c);

PhaseSpaceGrid sample_wigner(const WignerFn& w, const UniformAxis& x_axis, const UniformAxis& p_axis);

/// Phase-space axes spanning mean +- span_sigmas standard deviations per axis.
struct PhaseSpaceAxes {
    UniformAxis x;
    UniformAxis p;
};
PhaseSpaceAxes phase_space_axes(const Moments& moments, double mean_x, double mean_p,
                                const Constants& c, std::size_t nx = 256, std::size_t np = 256,
                                double span_sigmas = 8.0);

/// Momentum-space amplitude psi~(p) = (2 pi hbar)^{-1/2} int e^{-ipx/hbar} psi(x) dx, evaluated
/// with the Fourier-type canonical kernel (a = d = 0, b = -1, c = 1).
ComplexGrid momentum_amplitude(const ComplexGrid& psi, const UniformAxis& p_axis, const Constants& c);

}  // namespace wpdyn

#pragma once

#include <complex>
#include <functional>

#include "wpdyn/core.hpp"
#include "wpdyn/evolution.hpp"
#include "wpdyn/grid.hpp"

namespace wpdyn {

/// Entries of a linear canonical map. The configuration-space kernel built from them obeys
///   (a x + b p) K = x' K,   (c x + d p) K = -p' K
/// with p = (hbar/i) d/dx acting on the first argument and p' on the second.
struct SymplecticParams {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 1.0;

    double det() const noexcept { return a * d - b * c; }
    /// Throws ValidationError when |ad - bc - 1| > tol.
    void validate(double tol = 1e-12) const;
};

enum class KernelDirection { forward, inverse };

/// Parameters of the time-dependent kernel K(x, x', t, 0). Forward maps psi(x', 0) to psi(x, t);
/// inverse maps psi(x, t) back to psi(x', 0).
struct TDKernelParams {
    double z_hat = 0.0;
    double z_hat_dot = 0.0;
    double u_hat = 0.0;
    double u_hat_dot = 0.0;
    double alpha0 = 1.0;
    KernelDirection direction = KernelDirection::forward;
    /// Number of sign changes of z_hat on (0, t]; each contributes exp(-i pi/2) to the prefactor.
    int maslov_index = 0;

    double wronskian() const noexcept { return z_hat_dot * u_hat - u_hat_dot * z_hat; }
    void validate(double tol = 1e-9) const;
};

struct KernelCutoffs {
    double b_min = 1e-8;
    double z_min = 1e-8;
};

/// (1/(2 pi i hbar b))^{1/2} exp{-(i/(2 hbar b)) [a x^2 - 2 x x' + d x'^2]}, principal branch.
std::complex<double> kernel_ti(const SymplecticParams& params, double x, double x_prime,
                               const Constants& c, KernelCutoffs cutoffs = {});

struct KernelOdeResiduals {
    /// max |(a x + b p) K - x' K|
    double first = 0.0;
    /// max |(c x + d p) K + p' K|
    double second = 0.0;
};

struct ProbeGrid {
    double lo = -2.0;
    double hi = 2.0;
    std::size_t count = 21;
    /// Finite-difference step for the five-point derivative stencil.
    double h = 1e-4;
};

KernelOdeResiduals satisfies_kernel_odes(const SymplecticParams& params, const Constants& c,
                                         const ProbeGrid& probe = {});

TDKernelParams td_kernel_params(const Trajectory& traj, std::size_t index,
                                KernelDirection direction = KernelDirection::forward);

/// Forward: (m/(2 pi i hbar alpha0 z))^{1/2} exp{(i m/(2 hbar z)) [z' x^2 - 2 x x'/alpha0 + u (x'/alpha0)^2]}.
/// Inverse: K_inv(x_out, x_in) = conj(K_fwd(x_in, x_out)); the exponent flips sign and u takes
/// the place of z' on the output variable.
std::complex<double> kernel_td(const TDKernelParams& params, double x_out, double x_in,
                               const Constants& c, KernelCutoffs cutoffs = {});

/// The forward kernel written as a time-independent canonical kernel, equal to kernel_ti up to a
/// constant phase: a = alpha0 z', b = -alpha0 z/m, c = -m u'/alpha0, d = u/alpha0.
SymplecticParams symplectic_params(const TDKernelParams& params, const Constants& c);

using KernelFn = std::function<std::complex<double>(double x_out, double x_in)>;

/// psi_out(x) = sum_j K(x, x_j) psi(x_j) dx with trapezoid weights. Sets the coverage warning
/// when more than 1e-8 of the input mass sits in the outer sixteenth of the grid.
ComplexGrid apply_kernel(const KernelFn& kernel, const ComplexGrid& psi_in, const UniformAxis& x_out);

}  // namespace wpdyn

#pragma once

#include <complex>
#include <vector>

#include "wpdyn/evolution.hpp"
#include "wpdyn/grid.hpp"

namespace wpdyn {

/// psi(x) = norm_phase * exp{ (i m / 2 hbar) y_complex (x - mean_x)^2 + (i/hbar) mean_p (x - mean_x) }
///
/// y_complex is the Riccati width variable (2 hbar/m) y = lambda'/lambda. Its imaginary part is
/// 1/alpha^2, so the Gaussian is normalizable for every valid lambda.
struct GaussianPacket {
    double t = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    std::complex<double> y_complex;
    /// (m / pi hbar)^{1/4} lambda^{-1/2} exp(i S / hbar); the square-root branch follows the
    /// unwrapped phase of lambda, S is the classical action along eta.
    std::complex<double> norm_phase;
    Constants constants;

    std::complex<double> operator()(double x) const;
};

/// <x~^2>, <p~^2>, <x~p~ + p~x~>
struct Moments {
    double var_x = 0.0;
    double var_p = 0.0;
    double corr = 0.0;
};

GaussianPacket make_packet(const LambdaState& state, const ClassicalState& classical,
                           const InitialPacket& packet, const Constants& c);

GaussianPacket propagate_analytic(const Trajectory& traj, std::size_t index);

/// The t = 0 packet, psi(x, 0).
GaussianPacket initial_packet_state(const InitialPacket& packet, const Constants& c);

/// Samples psi on the axis. Sets the coverage warning when more than 1e-6 of |psi|^2 lies
/// outside the axis range.
ComplexGrid evaluate_wavefunction(const GaussianPacket& packet, const UniformAxis& axis);

/// <x~^2> = (hbar/2m)|lambda|^2, <p~^2> = (hbar m/2)|lambda'|^2, corr = hbar Re(lambda' conj lambda)
Moments moments_from_lambda(const LambdaState& state, const Constants& c);

}  // namespace wpdyn

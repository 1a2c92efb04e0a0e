#pragma once

#include <complex>
#include <vector>

#include "wpdyn/core.hpp"

namespace wpdyn {

/// Complex linearization variable lambda = u + i z of the width Riccati equation and its
/// polar decomposition lambda = alpha exp(i phi).
struct LambdaState {
    double t = 0.0;
    std::complex<double> lambda;
    std::complex<double> lambda_dot;
    double alpha = 0.0;
    double alpha_dot = 0.0;
    /// Continuously unwrapped phase of lambda.
    double phi = 0.0;
    /// Angular velocity Im(lambda_dot conj(lambda)) / alpha^2. Equals 1/alpha^2 on valid states.
    double phi_dot = 0.0;

    double z_hat() const noexcept { return lambda.imag(); }
    double z_hat_dot() const noexcept { return lambda_dot.imag(); }
    double u_hat() const noexcept { return lambda.real(); }
    double u_hat_dot() const noexcept { return lambda_dot.real(); }
    /// z_dot u - u_dot z
    double wronskian() const noexcept;

    /// Fills alpha, alpha_dot, phi_dot from lambda and lambda_dot.
    static LambdaState from_lambda(double t, std::complex<double> lambda,
                                   std::complex<double> lambda_dot, double phi);
};

/// Classical trajectory eta(t) of the packet centre.
struct ClassicalState {
    double t = 0.0;
    double eta = 0.0;
    double eta_dot = 0.0;
};

struct TrajectorySample {
    LambdaState lambda;
    ClassicalState classical;
};

struct Trajectory {
    SystemSpec system;
    InitialPacket packet;
    std::vector<TrajectorySample> samples;

    std::size_t size() const noexcept { return samples.size(); }
    const TrajectorySample& operator[](std::size_t i) const { return samples[i]; }
};

struct IntegratorOptions {
    /// Maximum internal step of the fixed-step RK4 integrator.
    double dt = 1e-3;
};

/// 0, dt*sample_every, ... up to t_end (t_end always included).
std::vector<double> sample_times(double t_end, double dt, int sample_every);

/// Integrates lambda'' + omega^2 lambda = 0 and eta'' + omega^2 eta = 0 with classic RK4.
/// Initial data: lambda(0) = alpha0, lambda'(0) = i/alpha0, eta(0) = x0, eta'(0) = p0/m.
/// phi is integrated from phi' = 1/|lambda|^2.
Trajectory solve_lambda(const SystemSpec& system, const InitialPacket& packet,
                        const std::vector<double>& t_grid, IntegratorOptions options = {});

/// Exact lambda(t) for Free and ConstantOmega systems.
LambdaState closed_form_lambda(const SystemSpec& system, const InitialPacket& packet, double t);

/// Exact classical trajectory for Free and ConstantOmega systems.
ClassicalState closed_form_classical(const SystemSpec& system, const InitialPacket& packet,
                                     double t);

/// |alpha'' + omega^2 alpha - 1/alpha^3|, alpha'' obtained from lambda'' = -omega^2 lambda.
double ermakov_residual(const LambdaState& state, double omega);

}  // namespace wpdyn

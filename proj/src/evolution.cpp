#include "wpdyn/evolution.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "wpdyn/errors.hpp"

namespace wpdyn {

namespace {

using cplx = std::complex<double>;

// y = (Re lambda, Im lambda, Re lambda', Im lambda', eta, eta', phi)
using State = std::array<double, 7>;

State derivative(const SystemSpec& system, double t, const State& y) {
    const double w = omega_at(system, t);
    const double w2 = w * w;
    const double a2 = y[0] * y[0] + y[1] * y[1];
    return {y[2], y[3], -w2 * y[0], -w2 * y[1], y[5], -w2 * y[4], 1.0 / a2};
}

State axpy(const State& y, double h, const State& k) {
    State r;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] + h * k[i];
    return r;
}

void rk4_step(const SystemSpec& system, double t, double h, State& y) {
    const State k1 = derivative(system, t, y);
    const State k2 = derivative(system, t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State k3 = derivative(system, t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State k4 = derivative(system, t + h, axpy(y, h, k3));
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool all_finite(const State& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

TrajectorySample to_sample(double t, const State& y) {
    return {LambdaState::from_lambda(t, {y[0], y[1]}, {y[2], y[3]}, y[6]), {t, y[4], y[5]}};
}

double constant_omega(const SystemSpec& system) {
    if (const auto* c = std::get_if<ConstantOmega>(&system.frequency_law())) return c->omega;
    if (std::holds_alternative<Free>(system.frequency_law())) return 0.0;
    throw CapabilityError("closed form requires a Free or ConstantOmega system");
}

}  // namespace

double LambdaState::wronskian() const noexcept {
    return z_hat_dot() * u_hat() - u_hat_dot() * z_hat();
}

LambdaState LambdaState::from_lambda(double t, cplx lambda, cplx lambda_dot, double phi) {
    LambdaState s;
    s.t = t;
    s.lambda = lambda;
    s.lambda_dot = lambda_dot;
    s.alpha = std::abs(lambda);
    const cplx cross = lambda_dot * std::conj(lambda);
    s.alpha_dot = cross.real() / s.alpha;
    s.phi = phi;
    s.phi_dot = cross.imag() / (s.alpha * s.alpha);
    return s;
}

std::vector<double> sample_times(double t_end, double dt, int sample_every) {
    if (!(t_end > 0.0) || !(dt > 0.0) || sample_every < 1)
        throw ConfigError("sample_times: need t_end > 0, dt > 0, sample_every >= 1");
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    std::vector<double> out;
    for (long k = 0; k < steps; k += sample_every) out.push_back(static_cast<double>(k) * dt);
    if (out.empty() || out.back() < t_end) out.push_back(t_end);
    return out;
}

Trajectory solve_lambda(const SystemSpec& system, const InitialPacket& packet,
                        const std::vector<double>& t_grid, IntegratorOptions options) {
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw ConfigError("solve_lambda: t_grid must start at 0");
    if (!(options.dt > 0.0) || !std::isfinite(options.dt))
        throw ConfigError("solve_lambda: dt must be positive");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ConfigError("solve_lambda: t_grid must be strictly increasing");

    const double a0 = packet.alpha0();
    State y{a0, 0.0, 0.0, 1.0 / a0, packet.x0(), packet.p0() / system.constants().mass(), 0.0};

    Trajectory traj{system, packet, {}};
    traj.samples.reserve(t_grid.size());
    traj.samples.push_back(to_sample(0.0, y));

    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double t0 = t_grid[i - 1];
        const double span = t_grid[i] - t0;
        const auto n = static_cast<long>(std::max(1.0, std::ceil(span / options.dt - 1e-9)));
        const double h = span / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
            const double t = t0 + static_cast<double>(k) * h;
            rk4_step(system, t, h, y);
            if (!all_finite(y) || y[0] * y[0] + y[1] * y[1] == 0.0)
                throw DivergenceError("solve_lambda: non-finite state at t = " + std::to_string(t + h),
                                      t + h);
        }
        traj.samples.push_back(to_sample(t_grid[i], y));
    }
    return traj;
}

LambdaState closed_form_lambda(const SystemSpec& system, const InitialPacket& packet, double t) {
    const double w = constant_omega(system);
    const double a0 = packet.alpha0();
    if (w == 0.0) {
        const cplx lambda(a0, t / a0);
        const cplx lambda_dot(0.0, 1.0 / a0);
        return LambdaState::from_lambda(t, lambda, lambda_dot, std::atan(t / (a0 * a0)));
    }
    const double s = std::sin(w * t);
    const double c = std::cos(w * t);
    const cplx lambda(a0 * c, s / (a0 * w));
    const cplx lambda_dot(-a0 * w * s, c / a0);
    // phi = atan(tan(wt) / (a0^2 w)) on the branch continuous in t
    const double theta = w * t;
    const double n = std::round(theta / std::numbers::pi);
    const double r = theta - n * std::numbers::pi;
    const double phi = n * std::numbers::pi + std::atan2(std::sin(r) / (a0 * a0 * w), std::cos(r));
    return LambdaState::from_lambda(t, lambda, lambda_dot, phi);
}

ClassicalState closed_form_classical(const SystemSpec& system, const InitialPacket& packet,
                                     double t) {
    const double w = constant_omega(system);
    const double x0 = packet.x0();
    const double v0 = packet.p0() / system.constants().mass();
    if (w == 0.0) return {t, x0 + v0 * t, v0};
    const double s = std::sin(w * t);
    const double c = std::cos(w * t);
    return {t, x0 * c + v0 / w * s, -x0 * w * s + v0 * c};
}

double ermakov_residual(const LambdaState& state, double omega) {
    if (!(state.alpha > 0.0)) throw ValidationError("ermakov_residual: alpha must be positive");
    const cplx lambda_ddot = -omega * omega * state.lambda;
    const double alpha_ddot =
        (std::norm(state.lambda_dot) + (lambda_ddot * std::conj(state.lambda)).real() -
         state.alpha_dot * state.alpha_dot) /
        state.alpha;
    const double a3 = state.alpha * state.alpha * state.alpha;
    return std::abs(alpha_ddot + omega * omega * state.alpha - 1.0 / a3);
}

}  // namespace wpdyn

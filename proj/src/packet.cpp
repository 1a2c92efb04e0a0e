#include "wpdyn/packet.hpp"

#include <cmath>
#include <numbers>

#include "wpdyn/errors.hpp"

namespace wpdyn {

namespace {

constexpr double kCoverageLimit = 1e-6;

}  // namespace

std::complex<double> GaussianPacket::operator()(double x) const {
    const double m = constants.mass();
    const double hbar = constants.hbar();
    const double dx = x - mean_x;
    const cplx exponent = cplx(0.0, m / (2.0 * hbar)) * y_complex * dx * dx +
                          cplx(0.0, mean_p * dx / hbar);
    return norm_phase * std::exp(exponent);
}

GaussianPacket make_packet(const LambdaState& state, const ClassicalState& classical,
                           const InitialPacket& packet, const Constants& c) {
    if (!(state.alpha > 0.0) || !std::isfinite(state.alpha))
        throw ValidationError("make_packet: singular width (alpha = 0)");
    const double m = c.mass();
    const double hbar = c.hbar();
    const double v0 = packet.p0() / m;

    // S(t) = integral of the classical Lagrangian = (m/2)(eta eta' - x0 v0) for quadratic H
    const double action = 0.5 * m * (classical.eta * classical.eta_dot - packet.x0() * v0);
    const double amplitude = std::pow(m / (std::numbers::pi * hbar), 0.25) / std::sqrt(state.alpha);
    const double phase = -0.5 * state.phi + action / hbar;

    GaussianPacket g;
    g.t = state.t;
    g.mean_x = classical.eta;
    g.mean_p = m * classical.eta_dot;
    g.y_complex = state.lambda_dot / state.lambda;
    g.norm_phase = std::polar(amplitude, phase);
    g.constants = c;
    return g;
}

GaussianPacket propagate_analytic(const Trajectory& traj, std::size_t index) {
    if (index >= traj.size()) throw RangeError("propagate_analytic: sample index out of range");
    const auto& s = traj[index];
    return make_packet(s.lambda, s.classical, traj.packet, traj.system.constants());
}

GaussianPacket initial_packet_state(const InitialPacket& packet, const Constants& c) {
    const double a0 = packet.alpha0();
    const auto state = LambdaState::from_lambda(0.0, {a0, 0.0}, {0.0, 1.0 / a0}, 0.0);
    return make_packet(state, {0.0, packet.x0(), packet.p0() / c.mass()}, packet, c);
}

ComplexGrid evaluate_wavefunction(const GaussianPacket& packet, const UniformAxis& axis) {
    std::vector<cplx> values(axis.count);
    for (std::size_t i = 0; i < axis.count; ++i) values[i] = packet(axis.at(i));
    ComplexGrid grid(axis, std::move(values));

    // |psi|^2 is a normal density with variance hbar / (2 m Im y)
    const double var = packet.constants.hbar() / (2.0 * packet.constants.mass() * packet.y_complex.imag());
    const double sd = std::sqrt(var);
    const double lo = (axis.min - packet.mean_x) / (sd * std::numbers::sqrt2);
    const double hi = (axis.max() - packet.mean_x) / (sd * std::numbers::sqrt2);
    const double outside = 0.5 * std::erfc(-lo) + 0.5 * std::erfc(hi);
    grid.diagnostics.outside_mass = outside;
    if (outside > kCoverageLimit) {
        grid.diagnostics.coverage_warning = true;
        grid.diagnostics.notes.push_back("wavefunction grid misses " + std::to_string(outside) +
                                         " of the probability");
    }
    return grid;
}

Moments moments_from_lambda(const LambdaState& state, const Constants& c) {
    const double hbar = c.hbar();
    const double m = c.mass();
    return {hbar / (2.0 * m) * std::norm(state.lambda), hbar * m / 2.0 * std::norm(state.lambda_dot),
            hbar * (state.lambda_dot * std::conj(state.lambda)).real()};
}

}  // namespace wpdyn

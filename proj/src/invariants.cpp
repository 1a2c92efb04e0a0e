#include "wpdyn/invariants.hpp"

#include <cmath>
#include <string>

#include "wpdyn/errors.hpp"

namespace wpdyn {

TransformMatrix::TransformMatrix(double m11, double m12, double m21, double m22, double alpha0,
                                 double t, double det_tol)
    : m_{m11, m12, m21, m22}, alpha0_(alpha0), t_(t) {
    if (!(alpha0 > 0.0)) throw ValidationError("TransformMatrix: alpha0 must be positive");
    if (!(std::abs(det() - 1.0) <= det_tol))
        throw ValidationError("TransformMatrix: det = " + std::to_string(det()) +
                              " is not 1 (t = " + std::to_string(t) + ")");
}

TransformMatrix TransformMatrix::non_canonical(double m11, double m12, double m21, double m22,
                                               double alpha0, double t) {
    if (!(alpha0 > 0.0)) throw ValidationError("TransformMatrix: alpha0 must be positive");
    TransformMatrix m;
    m.m_[0] = m11;
    m.m_[1] = m12;
    m.m_[2] = m21;
    m.m_[3] = m22;
    m.alpha0_ = alpha0;
    m.t_ = t;
    m.canonical_ = false;
    return m;
}

TransformMatrix matrix_from_state(const LambdaState& s, double alpha0) {
    return TransformMatrix(s.z_hat_dot(), -s.z_hat(), -s.u_hat_dot(), s.u_hat(), alpha0, s.t);
}

TransformMatrix frozen_width_matrix(const SystemSpec& system, double alpha0, double t) {
    if (!system.is_free()) throw CapabilityError("frozen_width_matrix: only defined for free motion");
    if (!(alpha0 > 0.0)) throw ValidationError("frozen_width_matrix: alpha0 must be positive");
    const double a3 = alpha0 * alpha0 * alpha0;
    return TransformMatrix::non_canonical(1.0 / alpha0, -t / alpha0, t / a3, alpha0, alpha0, t);
}

double ermakov_invariant(double eta, double eta_dot, double alpha, double alpha_dot) {
    if (!(alpha > 0.0)) throw ValidationError("ermakov_invariant: alpha must be positive");
    const double a = eta_dot * alpha - eta * alpha_dot;
    const double b = eta / alpha;
    return 0.5 * (a * a + b * b);
}

namespace {

double classical_scale(double alpha0, double p0, const Constants& c) {
    if (p0 == 0.0)
        throw CapabilityError("the classical-trajectory form of M needs p0 != 0 (scale m/(alpha0 p0))");
    return c.mass() / (alpha0 * p0);
}

}  // namespace

ClassicalMatrix matrix_from_classical(double eta, double eta_dot, double alpha, double alpha_dot,
                                      double alpha0, double p0, const Constants& c) {
    if (!(alpha > 0.0)) throw ValidationError("matrix_from_classical: alpha must be positive");
    const double k = classical_scale(alpha0, p0, c);
    return {k * eta_dot, -k * eta,
            k * (-eta_dot * alpha_dot * alpha + eta * (alpha_dot * alpha_dot + 1.0 / (alpha * alpha))),
            k * (eta_dot * alpha * alpha - eta * alpha_dot * alpha)};
}

double det_as_ermakov(double eta, double eta_dot, double alpha, double alpha_dot, double alpha0,
                      double p0, const Constants& c) {
    if (!(alpha > 0.0)) throw ValidationError("det_as_ermakov: alpha must be positive");
    const double k = classical_scale(alpha0, p0, c);
    const double a = eta_dot * alpha - alpha_dot * eta;
    const double b = eta / alpha;
    return k * k * (a * a + b * b);
}

double invariant_uncertainty_product(const Moments& m, const Constants&) {
    return m.var_x * m.var_p - 0.25 * m.corr * m.corr;
}

EnergyPartition energy_partition(const ClassicalState& cl, const LambdaState& s, const SystemSpec& system) {
    const double m = system.constants().mass();
    const double hbar = system.constants().hbar();
    const double w = omega_at(system, s.t);
    const double w2 = w * w;
    const double a2 = s.alpha * s.alpha;
    return {0.5 * m * (cl.eta_dot * cl.eta_dot + w2 * cl.eta * cl.eta),
            0.25 * hbar * (s.alpha_dot * s.alpha_dot + a2 * s.phi_dot * s.phi_dot + w2 * a2)};
}

UncertaintyCanonical uncertainty_canonical(const LambdaState& s, const Constants& c) {
    const double hbar = c.hbar();
    return {s.alpha, 0.5 * hbar * s.alpha_dot, s.phi, 0.5 * hbar * s.alpha * s.alpha * s.phi_dot};
}

double uncertainty_lagrangian(const LambdaState& s, double omega, const Constants& c) {
    const double a2 = s.alpha * s.alpha;
    return 0.25 * c.hbar() * (s.alpha_dot * s.alpha_dot + a2 * s.phi_dot * s.phi_dot - omega * omega * a2);
}

double uncertainty_hamiltonian(const UncertaintyCanonical& q, double omega, const Constants& c) {
    const double hbar = c.hbar();
    const double a2 = q.alpha * q.alpha;
    return q.p_alpha * q.p_alpha / hbar + q.p_phi * q.p_phi / (hbar * a2) + 0.25 * hbar * omega * omega * a2;
}

double uncertainty_product_canonical(const UncertaintyCanonical& q) {
    const double ap = q.alpha * q.p_alpha;
    return q.p_phi * q.p_phi + ap * ap;
}

UncertaintyResiduals uncertainty_dynamics_residuals(const Trajectory& traj, std::size_t index) {
    if (index == 0 || index + 1 >= traj.size())
        throw RangeError("uncertainty_dynamics_residuals: needs an interior sample");
    const auto& c = traj.system.constants();
    const auto& cur = traj[index].lambda;
    const auto pphi = [&](std::size_t i) { return uncertainty_canonical(traj[i].lambda, c).p_phi; };
    const auto alpha = [&](std::size_t i) { return traj[i].lambda.alpha; };
    const auto time = [&](std::size_t i) { return traj[i].lambda.t; };

    double pphi_dot = 0.0, alpha_ddot = 0.0;
    const double h = time(index + 1) - time(index);
    bool uniform = index >= 2 && index + 2 < traj.size();
    if (uniform) {
        for (std::size_t k = index - 2; k < index + 2; ++k)
            uniform = uniform && std::abs((time(k + 1) - time(k)) - h) <= 1e-9 * h;
    }
    if (uniform) {
        // five-point central stencils, O(h^4)
        pphi_dot = (pphi(index - 2) - 8.0 * pphi(index - 1) + 8.0 * pphi(index + 1) - pphi(index + 2)) / (12.0 * h);
        alpha_ddot = (-alpha(index - 2) + 16.0 * alpha(index - 1) - 30.0 * alpha(index) + 16.0 * alpha(index + 1) -
                      alpha(index + 2)) /
                     (12.0 * h * h);
    } else {
        const double hb = time(index) - time(index - 1);
        const double hf = h;
        pphi_dot = (pphi(index + 1) - pphi(index - 1)) / (hb + hf);
        alpha_ddot = 2.0 * (hb * alpha(index + 1) - (hb + hf) * alpha(index) + hf * alpha(index - 1)) /
                     (hb * hf * (hb + hf));
    }
    const double w = omega_at(traj.system, cur.t);

    UncertaintyResiduals r;
    r.lagrangian_res_phi = pphi_dot;
    r.lagrangian_res_alpha = alpha_ddot + w * w * cur.alpha - cur.phi_dot * cur.phi_dot * cur.alpha;
    r.p_phi = pphi(index);
    return r;
}

}  // namespace wpdyn

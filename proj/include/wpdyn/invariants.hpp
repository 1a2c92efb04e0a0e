#pragma once

#include "wpdyn/core.hpp"
#include "wpdyn/evolution.hpp"
#include "wpdyn/packet.hpp"

namespace wpdyn {

/// Real 2x2 map (x, p/m) -> (x'/alpha0, alpha0 p'/m), rows (z', -z; -u', u).
class TransformMatrix {
  public:
    /// Canonical matrix; throws ValidationError if |det - 1| > det_tol.
    TransformMatrix(double m11, double m12, double m21, double m22, double alpha0, double t,
                    double det_tol = 1e-9);

    /// Matrix that is allowed to have det != 1 and is tagged non-canonical.
    static TransformMatrix non_canonical(double m11, double m12, double m21, double m22,
                                         double alpha0, double t);

    double m11() const noexcept { return m_[0]; }
    double m12() const noexcept { return m_[1]; }
    double m21() const noexcept { return m_[2]; }
    double m22() const noexcept { return m_[3]; }
    double alpha0() const noexcept { return alpha0_; }
    double t() const noexcept { return t_; }
    bool canonical() const noexcept { return canonical_; }
    double det() const noexcept { return m_[0] * m_[3] - m_[1] * m_[2]; }

  private:
    TransformMatrix() = default;
    double m_[4] = {1, 0, 0, 1};
    double alpha0_ = 1.0;
    double t_ = 0.0;
    bool canonical_ = true;
};

/// M = ((z', -z), (-u', u)) from the lambda state.
TransformMatrix matrix_from_state(const LambdaState& state, double alpha0);

/// The transformation for free motion with the width frozen at alpha0:
/// ((1/alpha0, -t/alpha0), (t/alpha0^3, alpha0)). det = 1 + (t/alpha0^2)^2.
TransformMatrix frozen_width_matrix(const SystemSpec& system, double alpha0, double t);

/// I_L = 1/2 [(eta' alpha - eta alpha')^2 + (eta/alpha)^2]
double ermakov_invariant(double eta, double eta_dot, double alpha, double alpha_dot);

/// Matrix expressed through the classical trajectory and the width (requires x0 = 0, p0 != 0):
/// (m/(alpha0 p0)) ((eta', -eta), (-eta' alpha' alpha + eta (alpha'^2 + 1/alpha^2), eta' alpha^2 - eta alpha' alpha))
struct ClassicalMatrix {
    double m11, m12, m21, m22;
    double det() const noexcept { return m11 * m22 - m12 * m21; }
};
ClassicalMatrix matrix_from_classical(double eta, double eta_dot, double alpha, double alpha_dot,
                                      double alpha0, double p0, const Constants& c);

/// (m/(alpha0 p0))^2 [(eta' alpha - alpha' eta)^2 + (eta/alpha)^2]. Throws CapabilityError if p0 = 0.
double det_as_ermakov(double eta, double eta_dot, double alpha, double alpha_dot, double alpha0,
                      double p0, const Constants& c);

/// <x~^2><p~^2> - <[x~,p~]_+>^2 / 4
double invariant_uncertainty_product(const Moments& m, const Constants& c);

struct EnergyPartition {
    double classical = 0.0;
    double fluctuation = 0.0;
    double total() const noexcept { return classical + fluctuation; }
};

/// E_cl = (m/2)(eta'^2 + omega^2 eta^2), E~ = (hbar/4)(alpha'^2 + alpha^2 phi'^2 + omega^2 alpha^2)
EnergyPartition energy_partition(const ClassicalState& classical, const LambdaState& state,
                                 const SystemSpec& system);

/// Canonical variables of the width dynamics.
struct UncertaintyCanonical {
    double alpha = 0.0;
    double p_alpha = 0.0;
    double phi = 0.0;
    double p_phi = 0.0;
};

UncertaintyCanonical uncertainty_canonical(const LambdaState& state, const Constants& c);

/// L~ = (hbar/4)(alpha'^2 + alpha^2 phi'^2 - omega^2 alpha^2)
double uncertainty_lagrangian(const LambdaState& state, double omega, const Constants& c);

/// H~ = p_alpha^2/hbar + p_phi^2/(hbar alpha^2) + (hbar/4) omega^2 alpha^2
double uncertainty_hamiltonian(const UncertaintyCanonical& q, double omega, const Constants& c);

/// p_phi^2 + (alpha p_alpha)^2; equals <x~^2><p~^2>.
double uncertainty_product_canonical(const UncertaintyCanonical& q);

struct UncertaintyResiduals {
    /// d/dt[(hbar/2) alpha^2 phi'] by central differences
    double lagrangian_res_phi = 0.0;
    /// alpha'' + omega^2 alpha - phi'^2 alpha with alpha'' by central differences
    double lagrangian_res_alpha = 0.0;
    double p_phi = 0.0;
};

/// Euler-Lagrange residuals at an interior sample from central differences of the neighbouring
/// samples: five-point stencils where two uniform neighbours exist on each side, else three-point.
UncertaintyResiduals uncertainty_dynamics_residuals(const Trajectory& traj, std::size_t index);

}  // namespace wpdyn

#include "wpdyn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wpdyn/errors.hpp"

namespace wpdyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeFraction = 1.0 / 16.0;
constexpr double kCoverageLimit = 1e-8;

cplx kernel_td_forward(const TDKernelParams& k, double x, double xp, const Constants& c) {
    const double m = c.mass();
    const double hbar = c.hbar();
    const double s = xp / k.alpha0;
    const double amplitude = std::sqrt(m / (2.0 * kPi * hbar * k.alpha0 * std::abs(k.z_hat)));
    double phase;
    if (k.maslov_index == 0) {
        // principal branch of (1/(i z))^{1/2}
        phase = k.z_hat > 0.0 ? -kPi / 4.0 : kPi / 4.0;
    } else {
        phase = -kPi / 4.0 - kPi / 2.0 * static_cast<double>(k.maslov_index);
    }
    phase += m / (2.0 * hbar * k.z_hat) * (k.z_hat_dot * x * x - 2.0 * x * s + k.u_hat * s * s);
    return std::polar(amplitude, phase);
}

}  // namespace

void SymplecticParams::validate(double tol) const {
    if (!(std::abs(det() - 1.0) <= tol))
        throw ValidationError("symplectic params: ad - bc = " + std::to_string(det()) + ", expected 1");
}

void TDKernelParams::validate(double tol) const {
    if (!(alpha0 > 0.0)) throw ValidationError("TDKernelParams: alpha0 must be positive");
    if (!(std::abs(wronskian() - 1.0) <= tol))
        throw ValidationError("TDKernelParams: z'u - u'z = " + std::to_string(wronskian()) +
                              ", expected 1");
}

cplx kernel_ti(const SymplecticParams& p, double x, double xp, const Constants& c,
               KernelCutoffs cutoffs) {
    if (!(std::abs(p.b) > cutoffs.b_min))
        throw DeltaLimitError("kernel_ti: |b| <= b_min; use the point map x' = a x");
    const double hbar = c.hbar();
    const cplx prefactor = std::sqrt(1.0 / cplx(0.0, 2.0 * kPi * hbar * p.b));
    const double phase = -(p.a * x * x - 2.0 * x * xp + p.d * xp * xp) / (2.0 * hbar * p.b);
    return prefactor * std::polar(1.0, phase);
}

KernelOdeResiduals satisfies_kernel_odes(const SymplecticParams& p, const Constants& c,
                                         const ProbeGrid& probe) {
    const double h = probe.h;
    const cplx hbar_over_i(0.0, -c.hbar());
    const auto K = [&](double x, double xp) { return kernel_ti(p, x, xp, c); };
    const auto d_first = [&](double x, double xp) {
        return (K(x - 2 * h, xp) - 8.0 * K(x - h, xp) + 8.0 * K(x + h, xp) - K(x + 2 * h, xp)) /
               (12.0 * h);
    };
    const auto d_second = [&](double x, double xp) {
        return (K(x, xp - 2 * h) - 8.0 * K(x, xp - h) + 8.0 * K(x, xp + h) - K(x, xp + 2 * h)) /
               (12.0 * h);
    };

    const auto axis = UniformAxis::closed(probe.lo, probe.hi, probe.count);
    KernelOdeResiduals r;
    for (std::size_t i = 0; i < axis.count; ++i) {
        for (std::size_t j = 0; j < axis.count; ++j) {
            const double x = axis.at(i);
            const double xp = axis.at(j);
            const cplx k = K(x, xp);
            const cplx dk = d_first(x, xp);
            const cplx r1 = p.a * x * k + p.b * hbar_over_i * dk - xp * k;
            const cplx r2 = p.c * x * k + p.d * hbar_over_i * dk + hbar_over_i * d_second(x, xp);
            r.first = std::max(r.first, std::abs(r1));
            r.second = std::max(r.second, std::abs(r2));
        }
    }
    return r;
}

TDKernelParams td_kernel_params(const Trajectory& traj, std::size_t index, KernelDirection direction) {
    if (index >= traj.size()) throw RangeError("td_kernel_params: sample index out of range");
    int crossings = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i <= index; ++i) {
        const double z = traj[i].lambda.z_hat();
        const int sign = (z > 0.0) - (z < 0.0);
        if (sign != 0) {
            if (last_sign != 0 && sign != last_sign) ++crossings;
            last_sign = sign;
        }
    }
    const auto& s = traj[index].lambda;
    TDKernelParams k;
    k.z_hat = s.z_hat();
    k.z_hat_dot = s.z_hat_dot();
    k.u_hat = s.u_hat();
    k.u_hat_dot = s.u_hat_dot();
    k.alpha0 = traj.packet.alpha0();
    k.direction = direction;
    k.maslov_index = crossings;
    return k;
}

cplx kernel_td(const TDKernelParams& params, double x_out, double x_in, const Constants& c,
               KernelCutoffs cutoffs) {
    if (!(std::abs(params.z_hat) > cutoffs.z_min))
        throw DeltaLimitError("kernel_td: |z_hat| <= z_min; the kernel is a delta function here");
    if (params.direction == KernelDirection::forward) return kernel_td_forward(params, x_out, x_in, c);
    return std::conj(kernel_td_forward(params, x_in, x_out, c));
}

SymplecticParams symplectic_params(const TDKernelParams& k, const Constants& c) {
    const double m = c.mass();
    return {k.alpha0 * k.z_hat_dot, -k.alpha0 * k.z_hat / m, -m * k.u_hat_dot / k.alpha0, k.u_hat / k.alpha0};
}

ComplexGrid apply_kernel(const KernelFn& kernel, const ComplexGrid& psi_in, const UniformAxis& x_out) {
    const std::size_t n = psi_in.size();
    std::vector<cplx> weighted(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
        weighted[j] = w * psi_in.dx * psi_in.values[j];
    }
    std::vector<cplx> out(x_out.count);
    for (std::size_t i = 0; i < x_out.count; ++i) {
        const double x = x_out.at(i);
        cplx s{};
        for (std::size_t j = 0; j < n; ++j)
            if (weighted[j] != cplx{}) s += kernel(x, psi_in.x(j)) * weighted[j];
        out[i] = s;
    }
    ComplexGrid result(x_out, std::move(out));
    result.diagnostics = psi_in.diagnostics;
    const double edge = edge_mass(psi_in, kEdgeFraction);
    if (edge > kCoverageLimit) {
        result.diagnostics.coverage_warning = true;
        result.diagnostics.outside_mass = std::max(result.diagnostics.outside_mass, edge);
        result.diagnostics.notes.push_back("kernel input has " + std::to_string(edge) +
                                           " of its mass near the grid edge");
    }
    return result;
}

}  // namespace wpdyn

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/invariants.hpp"

using namespace wpdyn;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

Trajectory run(const FrequencyLaw& law, const InitialPacket& p, double t_end, int every = 1) {
    return solve_lambda(SystemSpec({}, law), p, sample_times(t_end, 1e-3, every));
}

void check_matrix(const TransformMatrix& m, double m11, double m12, double m21, double m22, double eps = 1e-10) {
    CHECK(m.m11() == Approx(m11).epsilon(eps));
    CHECK(m.m12() == Approx(m12).epsilon(eps));
    CHECK(m.m21() == Approx(m21).epsilon(eps));
    CHECK(m.m22() == Approx(m22).epsilon(eps));
}

}  // namespace

TEST_CASE("transformation matrix examples") {
    const auto fr = run(Free{}, InitialPacket(0.0, 1.0, 1.0), 1.0, 1000);
    check_matrix(matrix_from_state(fr[fr.size() - 1].lambda, 1.0), 1.0, -1.0, 0.0, 1.0);
    check_matrix(matrix_from_state(fr[0].lambda, 1.0), 1.0, 0.0, 0.0, 1.0);

    const auto ho = closed_form_lambda(SystemSpec({}, ConstantOmega{1.0}), InitialPacket(0.0, 1.0, 1.0), kPi / 2);
    const auto m = matrix_from_state(ho, 1.0);
    CHECK(std::abs(m.m11()) < 1e-15);
    CHECK(m.m12() == Approx(-1.0));
    CHECK(m.m21() == Approx(1.0));
    CHECK(std::abs(m.m22()) < 1e-15);
    CHECK(m.canonical());
}

TEST_CASE("matrix validation") {
    CHECK_THROWS_AS(TransformMatrix(1.0, 1.0, 0.0, 2.0, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(TransformMatrix(1.0, 0.0, 0.0, 1.0, 0.0, 0.0), ValidationError);
    const auto nc = TransformMatrix::non_canonical(1.0, 1.0, 0.0, 2.0, 1.0, 0.0);
    CHECK_FALSE(nc.canonical());
    CHECK(nc.det() == 2.0);
}

TEST_CASE("frozen width determinant") {
    const SystemSpec free({}, Free{});
    CHECK(frozen_width_matrix(free, 1.0, 1.0).det() == Approx(2.0).epsilon(1e-15));
    CHECK(frozen_width_matrix(free, 1.0, 0.0).det() == 1.0);
    CHECK(frozen_width_matrix(free, 2.0, 4.0).det() == Approx(2.0).epsilon(1e-15));
    for (double a0 : {1.0, 2.0})
        for (double t : {1.0, 4.0}) {
            const auto m = frozen_width_matrix(free, a0, t);
            CHECK_FALSE(m.canonical());
            CHECK(std::abs(m.det() - (1.0 + std::pow(t / (a0 * a0), 2))) <= 1e-12);
        }
    CHECK_THROWS_AS(frozen_width_matrix(SystemSpec({}, ConstantOmega{1.0}), 1.0, 1.0), CapabilityError);
}

TEST_CASE("small-omega oscillator matrix approaches free motion") {
    const InitialPacket p(0.0, 1.0, 1.0);
    const auto ho = matrix_from_state(closed_form_lambda(SystemSpec({}, ConstantOmega{1e-6}), p, 1.0), 1.0);
    const auto fr = matrix_from_state(closed_form_lambda(SystemSpec({}, Free{}), p, 1.0), 1.0);
    CHECK(std::abs(ho.m11() - fr.m11()) < 1e-5);
    CHECK(std::abs(ho.m12() - fr.m12()) < 1e-5);
    CHECK(std::abs(ho.m21() - fr.m21()) < 1e-5);
    CHECK(std::abs(ho.m22() - fr.m22()) < 1e-5);
}

TEST_CASE("Ermakov invariant examples") {
    CHECK(ermakov_invariant(0.0, 1.0, 1.0, 0.0) == Approx(0.5));
    CHECK(ermakov_invariant(1.0, 1.0, std::sqrt(2.0), 1.0 / std::sqrt(2.0)) == Approx(0.5));
    CHECK(ermakov_invariant(0.0, 0.0, 1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(ermakov_invariant(0.0, 1.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("det as Ermakov") {
    const Constants c;
    CHECK(det_as_ermakov(1.0, 1.0, std::sqrt(2.0), 1.0 / std::sqrt(2.0), 1.0, 1.0, c) == Approx(1.0));
    CHECK_THROWS_AS(det_as_ermakov(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, c), CapabilityError);
    // frozen width: alpha stays alpha0, alpha' = 0, eta = v0 t
    for (double t : {0.0, 1.0, 3.0})
        CHECK(det_as_ermakov(t, 1.0, 1.0, 0.0, 1.0, 1.0, c) == Approx(1.0 + t * t));
    // oscillator with constant width and v0 = 1
    for (double t : {0.3, 1.0, 2.0, 5.0})
        CHECK(det_as_ermakov(std::sin(t), std::cos(t), 1.0, 0.0, 1.0, 1.0, c) == Approx(1.0));
}

TEST_CASE("classical-trajectory matrix equals the lambda matrix") {
    const Constants c(1.0, 1.7);
    const InitialPacket p(0.0, 0.9, 1.4);
    const auto tr = solve_lambda(SystemSpec(c, ModulatedOmega{1.0, 0.3, 2.0}), p, sample_times(5.0, 1e-3, 500));
    for (const auto& s : tr.samples) {
        const auto m = matrix_from_state(s.lambda, p.alpha0());
        const auto k = matrix_from_classical(s.classical.eta, s.classical.eta_dot, s.lambda.alpha, s.lambda.alpha_dot,
                                             p.alpha0(), p.p0(), c);
        CHECK(k.m11 == Approx(m.m11()).epsilon(1e-9));
        CHECK(k.m12 == Approx(m.m12()).epsilon(1e-9));
        CHECK(k.m21 == Approx(m.m21()).epsilon(1e-9));
        CHECK(k.m22 == Approx(m.m22()).epsilon(1e-9));
        CHECK(k.det() == Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("conservation along all frequency laws") {
    const FrequencyLaw laws[] = {Free{}, ConstantOmega{1.0}, RampOmega{0.5, 0.1}, ModulatedOmega{1.0, 0.3, 2.0}};
    for (const auto& law : laws) {
        for (double a0 : {1.0, 2.0}) {
            const InitialPacket p(0.0, 1.0, a0);
            const auto tr = run(law, p, 10.0, 50);
            const double il0 = 0.5 * a0 * a0;
            for (const auto& s : tr.samples) {
                const auto m = matrix_from_state(s.lambda, a0);
                CHECK(std::abs(m.det() - 1.0) <= 1e-9);
                const double il = ermakov_invariant(s.classical.eta, s.classical.eta_dot, s.lambda.alpha, s.lambda.alpha_dot);
                CHECK(std::abs(il - il0) / il0 <= 1e-8);
                CHECK(std::abs(m.det() - 2.0 / (a0 * a0) * il) <= 1e-9);
                const auto mo = moments_from_lambda(s.lambda, Constants());
                CHECK(std::abs(invariant_uncertainty_product(mo, Constants()) - 0.25) <= 1e-10);
                const auto q = uncertainty_canonical(s.lambda, Constants());
                CHECK(std::abs(q.p_phi - 0.5) <= 1e-10);
                CHECK(uncertainty_product_canonical(q) == Approx(mo.var_x * mo.var_p).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("invariant uncertainty product examples") {
    const Constants c;
    CHECK(invariant_uncertainty_product({1.0, 0.5, 1.0}, c) == Approx(0.25));
    CHECK(invariant_uncertainty_product({0.5, 0.5, 0.0}, c) == Approx(0.25));
    const Constants c2(0.4, 3.0);
    const auto tr = solve_lambda(SystemSpec(c2, ConstantOmega{2.0}), InitialPacket(0.0, 0.0, 0.3), sample_times(3.0, 1e-3, 300));
    for (const auto& s : tr.samples)
        CHECK(invariant_uncertainty_product(moments_from_lambda(s.lambda, c2), c2) == Approx(0.04).epsilon(1e-10));
}

TEST_CASE("energy partition") {
    const SystemSpec free({}, Free{});
    const auto tr = run(Free{}, InitialPacket(0.0, 1.0, 1.0), 1.0, 1000);
    for (const auto& s : tr.samples) {
        const auto e = energy_partition(s.classical, s.lambda, free);
        CHECK(e.classical == Approx(0.5));
        CHECK(e.fluctuation == Approx(0.25));
    }
    const SystemSpec ho({}, ConstantOmega{1.0});
    const auto g = run(ConstantOmega{1.0}, InitialPacket(0.0, 0.0, 1.0), 2.0, 500);
    for (const auto& s : g.samples) {
        const auto e = energy_partition(s.classical, s.lambda, ho);
        CHECK(e.classical == Approx(0.0));
        CHECK(e.fluctuation == Approx(0.5).epsilon(1e-10));
    }
    // fluctuation energy equals <p~^2>/2m + (m/2) omega^2 <x~^2>
    const auto b = run(ConstantOmega{1.0}, InitialPacket(0.0, 1.0, 2.0), 3.0, 700);
    for (const auto& s : b.samples) {
        const auto mo = moments_from_lambda(s.lambda, Constants());
        CHECK(energy_partition(s.classical, s.lambda, ho).fluctuation == Approx(0.5 * mo.var_p + 0.5 * mo.var_x).epsilon(1e-10));
    }
    // driven: energy changes
    const SystemSpec ramp({}, RampOmega{0.5, 0.1});
    const auto r = run(RampOmega{0.5, 0.1}, InitialPacket(0.0, 1.0, 1.0), 5.0, 5000);
    const double e0 = energy_partition(r[0].classical, r[0].lambda, ramp).total();
    const double e1 = energy_partition(r[r.size() - 1].classical, r[r.size() - 1].lambda, ramp).total();
    CHECK(std::abs(e1 - e0) > 1e-3);
}

TEST_CASE("uncertainty Lagrangian and Hamiltonian") {
    const Constants c;
    const SystemSpec sys({}, ConstantOmega{1.5});
    const auto s = closed_form_lambda(sys, InitialPacket(0.0, 0.0, 0.6), 0.8);
    const auto q = uncertainty_canonical(s, c);
    CHECK(q.p_alpha == Approx(0.5 * s.alpha_dot));
    CHECK(q.p_phi == Approx(0.5));
    const double lag = uncertainty_lagrangian(s, 1.5, c);
    CHECK(lag == Approx(0.25 * (s.alpha_dot * s.alpha_dot + s.alpha * s.alpha * s.phi_dot * s.phi_dot -
                                2.25 * s.alpha * s.alpha)));
    // Legendre transform: H = p_alpha alpha' + p_phi phi' - L
    CHECK(uncertainty_hamiltonian(q, 1.5, c) == Approx(q.p_alpha * s.alpha_dot + q.p_phi * s.phi_dot - lag));
    // and H equals the fluctuation energy
    CHECK(uncertainty_hamiltonian(q, 1.5, c) ==
          Approx(energy_partition(ClassicalState{}, s, sys).fluctuation));
}

TEST_CASE("Euler-Lagrange residuals") {
    const auto tr = run(Free{}, InitialPacket(0.0, 1.0, 1.0), 2.0);
    for (std::size_t i = 2; i + 2 < tr.size(); i += 97) {
        const auto r = uncertainty_dynamics_residuals(tr, i);
        CHECK(std::abs(r.lagrangian_res_phi) <= 1e-6);
        CHECK(std::abs(r.lagrangian_res_alpha) <= 1e-6);
        CHECK(r.p_phi == Approx(0.5).epsilon(1e-10));
    }
    // near the ends the three-point stencil is used
    CHECK(std::abs(uncertainty_dynamics_residuals(tr, 1).lagrangian_res_alpha) <= 1e-6);
    CHECK_THROWS_AS(uncertainty_dynamics_residuals(tr, 0), RangeError);
    CHECK_THROWS_AS(uncertainty_dynamics_residuals(tr, tr.size() - 1), RangeError);

    const auto mod = run(ModulatedOmega{1.0, 0.3, 2.0}, InitialPacket(0.0, 1.0, 1.0), 10.0);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < mod.size(); ++i) {
        const auto r = uncertainty_dynamics_residuals(mod, i);
        worst = std::max({worst, std::abs(r.lagrangian_res_phi), std::abs(r.lagrangian_res_alpha)});
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("Heisenberg picture oracle for the width") {
    // alpha^2 = 2 m var_x / hbar from the textbook moment evolution
    const auto tr = run(ConstantOmega{0.7}, InitialPacket(0.0, 0.0, 1.8), 6.0, 600);
    for (const auto& s : tr.samples) {
        const auto ref = oracle::ho_moments(0.5 * 1.8 * 1.8, 0.5 / (1.8 * 1.8), 0.7, s.lambda.t);
        const auto mo = moments_from_lambda(s.lambda, Constants());
        CHECK(mo.corr == Approx(ref.corr).epsilon(1e-9));
    }
}

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/kernels.hpp"
#include "wpdyn/packet.hpp"

using namespace wpdyn;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;
const UniformAxis kAxis{-15.0, 30.0 / 512, 512};

ComplexGrid gaussian_grid(double x0, double p0, double s2, const UniformAxis& ax = kAxis) {
    std::vector<cplx> v(ax.count);
    for (std::size_t i = 0; i < ax.count; ++i) v[i] = oracle::gaussian(ax.at(i), x0, p0, s2);
    return ComplexGrid(ax, std::move(v));
}

double distance(const ComplexGrid& a, const ComplexGrid& b) { return oracle::l2_distance(a.values, b.values, a.dx); }

double aligned(const ComplexGrid& a, const ComplexGrid& b) {
    return oracle::phase_aligned_distance(a.values, b.values, a.dx);
}

ComplexGrid apply_ti(const SymplecticParams& p, const ComplexGrid& psi) {
    return apply_kernel([&](double x, double xp) { return kernel_ti(p, x, xp, Constants()); }, psi, psi.axis());
}

SymplecticParams product(const SymplecticParams& l, const SymplecticParams& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

}  // namespace

TEST_CASE("Fourier-type kernel") {
    const SymplecticParams f{0.0, 1.0, -1.0, 0.0};
    const cplx pre = std::sqrt(1.0 / cplx(0.0, 2.0 * kPi));
    for (double x : {-1.0, 0.0, 0.4})
        for (double xp : {-0.7, 0.0, 2.0})
            CHECK(std::abs(kernel_ti(f, x, xp, Constants()) - pre * std::exp(cplx(0.0, x * xp))) < 1e-15);
}

TEST_CASE("delta limit") {
    CHECK_THROWS_AS(kernel_ti({1.0, 0.0, 0.0, 1.0}, 0.0, 0.0, Constants()), DeltaLimitError);
    CHECK_THROWS_AS(kernel_ti({1.0, 1e-9, 0.0, 1.0}, 0.0, 0.0, Constants()), CapabilityError);
    TDKernelParams k{1e-10, 1.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(kernel_td(k, 0.0, 0.0, Constants()), DeltaLimitError);
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(SymplecticParams{2.0, 1.0, 1.0, 1.0}.validate());
    CHECK_THROWS_AS((SymplecticParams{1.1, 1.0, 0.0, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((TDKernelParams{1.0, 1.0, 2.0, 0.0, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((TDKernelParams{1.0, 1.0, 1.0, 0.0, -1.0}.validate()), ValidationError);
}

TEST_CASE("kernel equations hold on a lattice of unimodular parameters") {
    CHECK(satisfies_kernel_odes({0.0, 1.0, -1.0, 0.0}, Constants()).first < 1e-5);
    CHECK(satisfies_kernel_odes({0.0, 1.0, -1.0, 0.0}, Constants()).second < 1e-5);
    for (const auto& l : oracle::symplectic_lattice()) {
        const SymplecticParams p{l.a, l.b, l.c, l.d};
        CHECK_NOTHROW(p.validate());
        const auto r = satisfies_kernel_odes(p, Constants());
        CHECK(r.first < 1e-5);
        CHECK(r.second < 1e-5);
    }
    // non-unit determinant: the second equation breaks
    const auto bad = satisfies_kernel_odes({1.1, 1.0, 0.0, 1.0}, Constants());
    CHECK(bad.second > 1e-3);
}

TEST_CASE("kernel equations with other constants") {
    const Constants c(0.3, 2.5);
    const auto r = satisfies_kernel_odes({1.3, 0.9, (1.3 * 0.6 - 1.0) / 0.9, 0.6}, c);
    CHECK(r.first < 1e-5);
    CHECK(r.second < 1e-5);
}

TEST_CASE("canonical kernels are unitary") {
    const auto a = gaussian_grid(0.5, 0.3, 0.6);
    const auto b = gaussian_grid(-1.0, -0.5, 1.3);
    const cplx before = inner_product(a, b);
    for (const auto& l : oracle::symplectic_lattice()) {
        const SymplecticParams p{l.a, l.b, l.c, l.d};
        const auto ua = apply_ti(p, a);
        const auto ub = apply_ti(p, b);
        // states that stay on the grid keep their norm and overlap
        if (ua.diagnostics.coverage_warning || edge_mass(ua, 1.0 / 16) > 1e-12 || edge_mass(ub, 1.0 / 16) > 1e-12) continue;
        CHECK(ua.norm_squared() == Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(inner_product(ua, ub) - before) < 1e-8);
    }
}

TEST_CASE("composition follows the matrix product") {
    const SymplecticParams m1{1.2, 0.5, (1.2 * 0.4 - 1.0) / 0.5, 0.4};
    const SymplecticParams m2{0.3, -0.8, (0.3 * 1.1 - 1.0) / -0.8, 1.1};
    const auto psi = gaussian_grid(0.2, 0.4, 0.5);
    const auto two_steps = apply_ti(m2, apply_ti(m1, psi));
    // the parameters map output coordinates back onto input ones, so they compose as m1 m2
    const auto one_step = apply_ti(product(m1, m2), psi);
    CHECK(aligned(two_steps, one_step) < 1e-8);
    CHECK(aligned(two_steps, apply_ti(product(m2, m1), psi)) > 1e-2);
}

TEST_CASE("Fourier kernel maps a Gaussian to the reciprocal-width Gaussian") {
    const double s2 = 0.8;
    const auto psi = gaussian_grid(0.0, 0.0, s2);
    const auto out = apply_ti({0.0, 1.0, -1.0, 0.0}, psi);
    const double s2p = 1.0 / (4.0 * s2);
    for (std::size_t i = 0; i < out.size(); i += 16)
        CHECK(std::abs(std::abs(out.values[i]) - std::abs(oracle::gaussian(out.x(i), 0.0, 0.0, s2p))) < 1e-10);
}

TEST_CASE("time-dependent kernel of free motion") {
    const Trajectory tr = solve_lambda(SystemSpec({}, Free{}), InitialPacket(0.0, 1.0, 1.0), {0.0, 1.0});
    const auto k = td_kernel_params(tr, 1);
    CHECK(k.z_hat == Approx(1.0));
    CHECK(k.z_hat_dot == Approx(1.0));
    CHECK(k.u_hat == Approx(1.0));
    CHECK(k.maslov_index == 0);
    // x^2 coefficient of the exponent: i/2
    const cplx ratio = kernel_td(k, 0.3, 0.0, Constants()) / kernel_td(k, 0.0, 0.0, Constants());
    CHECK(std::abs(ratio - std::exp(cplx(0.0, 0.5 * 0.09))) < 1e-12);
    // and the textbook propagator itself
    for (double x : {-1.0, 0.5})
        for (double xp : {0.0, 2.0})
            CHECK(std::abs(kernel_td(k, x, xp, Constants()) - oracle::free_kernel(x, xp, 1.0)) < 1e-10);
    CHECK_THROWS_AS(td_kernel_params(tr, 2), RangeError);
}

TEST_CASE("time-dependent kernel reproduces the analytic packet") {
    const UniformAxis ax{-20.0, 40.0 / 1024, 1024};
    struct Case {
        FrequencyLaw law;
        double alpha0;
        double t;
        int crossings;
    };
    const Case cases[] = {{Free{}, 1.0, 1.0, 0},
                          {ConstantOmega{1.0}, 1.0, 1.0, 0},
                          {ConstantOmega{1.0}, 2.0, 2.0, 0},
                          {ConstantOmega{1.0}, 1.0, 4.0, 1},
                          {ConstantOmega{1.0}, 0.7, 7.0, 2},
                          {ModulatedOmega{1.0, 0.3, 2.0}, 1.0, 1.0, 0},
                          {RampOmega{0.5, 0.1}, 1.2, 1.5, 0}};
    for (const auto& cs : cases) {
        const SystemSpec sys({}, cs.law);
        const InitialPacket p(0.3, 0.8, cs.alpha0);
        const auto tr = solve_lambda(sys, p, sample_times(cs.t, 1e-3, 1));
        const std::size_t last = tr.size() - 1;
        const auto fwd = td_kernel_params(tr, last);
        CHECK(fwd.maslov_index == cs.crossings);
        CHECK_NOTHROW(fwd.validate());
        const auto psi0 = evaluate_wavefunction(initial_packet_state(p, Constants()), ax);
        const auto expected = evaluate_wavefunction(propagate_analytic(tr, last), ax);
        const auto out = apply_kernel([&](double x, double xp) { return kernel_td(fwd, x, xp, Constants()); }, psi0, ax);
        CHECK(distance(out, expected) < 1e-6);

        auto inv = fwd;
        inv.direction = KernelDirection::inverse;
        const auto back = apply_kernel([&](double x, double xp) { return kernel_td(inv, x, xp, Constants()); }, out, ax);
        CHECK(distance(back, psi0) < 1e-5);

        // same operator as the time-independent kernel, up to a constant phase
        const auto sp = symplectic_params(fwd, Constants());
        CHECK_NOTHROW(sp.validate(1e-9));
        const auto ti = apply_kernel([&](double x, double xp) { return kernel_ti(sp, x, xp, Constants()); }, psi0, ax);
        CHECK(aligned(ti, expected) < 1e-6);
    }
}

TEST_CASE("kernel quadrature agrees with the Mehler kernel") {
    const InitialPacket p(0.0, 1.0, 1.0);
    const auto tr = solve_lambda(SystemSpec({}, ConstantOmega{1.0}), p, sample_times(1.0, 1e-3, 1));
    const auto k = td_kernel_params(tr, tr.size() - 1);
    for (double x : {-1.0, 0.5})
        for (double xp : {0.0, 2.0})
            CHECK(std::abs(kernel_td(k, x, xp, Constants()) - oracle::mehler_kernel(x, xp, 1.0, 1.0)) < 1e-10);
}

TEST_CASE("apply_kernel flags inputs that reach the grid edge") {
    const auto psi = gaussian_grid(13.0, 0.0, 0.5);
    const auto out = apply_ti({0.0, 1.0, -1.0, 0.0}, psi);
    CHECK(out.diagnostics.coverage_warning);
    const auto centred = apply_ti({0.0, 1.0, -1.0, 0.0}, gaussian_grid(0.0, 0.0, 0.5));
    CHECK_FALSE(centred.diagnostics.coverage_warning);
}

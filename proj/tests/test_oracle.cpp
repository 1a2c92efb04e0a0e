#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wpdyn/errors.hpp"
#include "wpdyn/oracle.hpp"
#include "wpdyn/packet.hpp"

using namespace wpdyn;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

GridState initial(const InitialPacket& p, const UniformAxis& ax, const Constants& c = {}) {
    return {evaluate_wavefunction(initial_packet_state(p, c), ax), 0.0};
}

GridState analytic(const SystemSpec& sys, const InitialPacket& p, double t, const UniformAxis& ax) {
    const auto tr = solve_lambda(sys, p, sample_times(t, 1e-3, 1));
    return {evaluate_wavefunction(propagate_analytic(tr, tr.size() - 1), ax), t};
}

double oracle_error(const SystemSpec& sys, const InitialPacket& p, double t, double dt, const UniformAxis& ax) {
    const auto out = split_step(initial(p, ax), sys, dt, std::lround(t / dt));
    return compare_states(out, analytic(sys, p, t, ax), sys.constants()).phase_aligned_l2_error;
}

}  // namespace

TEST_CASE("free packet to t = 1") {
    const UniformAxis ax{-15.0, 30.0 / 1024, 1024};
    const SystemSpec sys({}, Free{});
    const InitialPacket p(0.0, 1.0, 1.0);
    const auto out = split_step(initial(p, ax), sys, 1e-3, 1000);
    CHECK(out.t == Approx(1.0));
    const auto cmp = compare_states(out, analytic(sys, p, 1.0, ax), Constants());
    // free evolution is exact in the split scheme, phase included
    CHECK(cmp.l2_error <= 1e-6);
    CHECK(cmp.moment_errors.max() <= 1e-6);
    CHECK_FALSE(out.grid.diagnostics.coverage_warning);
}

TEST_CASE("ground state of the oscillator is stationary") {
    const UniformAxis ax{-10.0, 20.0 / 256, 256};
    const SystemSpec sys({}, ConstantOmega{1.0});
    auto st = initial(InitialPacket(0.0, 0.0, 1.0), ax);
    const auto rho0 = st.grid.values;
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
        st = split_step(st, sys, 2.0 * kPi / 8000, 1000);
        for (std::size_t i = 0; i < rho0.size(); ++i)
            worst = std::max(worst, std::abs(std::norm(st.grid.values[i]) - std::norm(rho0[i])));
    }
    CHECK(worst <= 1e-7);
    CHECK(st.t == Approx(2.0 * kPi));
}

TEST_CASE("zero steps return the input") {
    const UniformAxis ax{-10.0, 20.0 / 128, 128};
    const auto st = initial(InitialPacket(0.3, 1.0, 1.0), ax);
    const auto out = split_step(st, SystemSpec({}, ConstantOmega{1.0}), 0.01, 0);
    CHECK(out.t == st.t);
    CHECK(out.grid.values == st.grid.values);
}

TEST_CASE("input checks") {
    const SystemSpec sys({}, Free{});
    const auto st = initial(InitialPacket(0.0, 0.0, 1.0), UniformAxis{-10.0, 20.0 / 100, 100});
    CHECK_THROWS_AS(split_step(st, sys, 0.01, 1), ConfigError);
    const auto ok = initial(InitialPacket(0.0, 0.0, 1.0), UniformAxis{-10.0, 20.0 / 128, 128});
    CHECK_THROWS_AS(split_step(ok, sys, 0.01, -1), ConfigError);
    CHECK_THROWS_AS(split_step(ok, sys, -0.01, 1), ConfigError);
}

TEST_CASE("resolution error when the momentum band is too narrow") {
    // p0 = 20 on a grid whose Nyquist momentum is about 13
    const auto st = initial(InitialPacket(0.0, 20.0, 1.0), UniformAxis{-15.0, 30.0 / 128, 128});
    CHECK_THROWS_AS(split_step(st, SystemSpec({}, Free{}), 0.01, 1), ResolutionError);
}

TEST_CASE("coverage warning when the packet leaves the centre") {
    const auto st = initial(InitialPacket(0.0, 3.0, 1.0), UniformAxis{-10.0, 20.0 / 256, 256});
    const auto out = split_step(st, SystemSpec({}, Free{}), 0.01, 100);
    CHECK(out.grid.diagnostics.coverage_warning);
}

TEST_CASE("compare_states") {
    const UniformAxis ax{-10.0, 20.0 / 256, 256};
    const auto a = initial(InitialPacket(0.0, 1.0, 1.0), ax);
    auto cmp = compare_states(a, a, Constants());
    CHECK(cmp.l2_error == 0.0);
    CHECK(cmp.phase_aligned_l2_error == 0.0);
    CHECK(cmp.moment_errors.max() == 0.0);

    auto b = a;
    for (auto& v : b.grid.values) v *= std::polar(1.0, 0.7);
    cmp = compare_states(a, b, Constants());
    CHECK(cmp.l2_error > 0.1);
    CHECK(cmp.phase_aligned_l2_error <= 1e-12);

    const auto other = initial(InitialPacket(0.0, 1.0, 1.0), UniformAxis{-10.0, 20.0 / 128, 128});
    CHECK_THROWS_AS(compare_states(a, other, Constants()), ValidationError);
}

TEST_CASE("oscillator packet agrees with the textbook propagator") {
    const UniformAxis ax{-15.0, 30.0 / 512, 512};
    const SystemSpec sys({}, ConstantOmega{1.0});
    const InitialPacket p(1.0, 0.5, 1.4);
    const auto st = initial(p, ax);
    const auto out = split_step(st, sys, 1e-3, 1000);
    const auto ref = oracle::propagate([](double x, double xp) { return oracle::mehler_kernel(x, xp, 1.0, 1.0); },
                                       st.grid.values, ax.min, ax.step);
    CHECK(oracle::phase_aligned_distance(out.grid.values, ref, ax.step) <= 1e-6);
}

TEST_CASE("second-order convergence") {
    const UniformAxis ax{-20.0, 40.0 / 1024, 1024};
    const InitialPacket p(0.0, 1.0, 2.0);
    for (const auto& law : {FrequencyLaw{ConstantOmega{1.0}}, FrequencyLaw{ModulatedOmega{1.0, 0.3, 2.0}}}) {
        const SystemSpec sys({}, law);
        const double e1 = oracle_error(sys, p, 1.0, 0.02, ax);
        const double e2 = oracle_error(sys, p, 1.0, 0.01, ax);
        const double ratio = e1 / e2;
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("grid moments in other units") {
    const Constants c(0.5, 2.0);
    const UniformAxis ax{-10.0, 20.0 / 512, 512};
    const InitialPacket p(0.2, 0.6, 1.3);
    const auto st = initial(p, ax, c);
    const auto m = grid_moments(st.grid, c);
    const auto v = validate_packet(p, c);
    CHECK(m.norm == Approx(1.0).epsilon(1e-10));
    CHECK(m.mean_x == Approx(0.2).epsilon(1e-10));
    CHECK(m.mean_p == Approx(0.6).epsilon(1e-10));
    CHECK(m.var_x == Approx(v.var_x).epsilon(1e-10));
    CHECK(m.var_p == Approx(v.var_p).epsilon(1e-10));
    CHECK(std::abs(m.corr) < 1e-10);
}

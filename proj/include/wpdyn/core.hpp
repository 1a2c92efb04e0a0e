#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace wpdyn {

/// Physical constants. Natural units (hbar = m = 1) unless overridden.
class Constants {
  public:
    Constants() = default;
    Constants(double hbar, double mass);

    double hbar() const noexcept { return hbar_; }
    double mass() const noexcept { return mass_; }

  private:
    double hbar_ = 1.0;
    double mass_ = 1.0;
};

// Frequency laws omega(t).
struct Free {};

struct ConstantOmega {
    double omega = 0.0;
};

/// omega(t) = omega0 + slope * t
struct RampOmega {
    double omega0 = 0.0;
    double slope = 0.0;
};

/// omega(t) = omega0 * (1 + epsilon * cos(gamma * t))
struct ModulatedOmega {
    double omega0 = 0.0;
    double epsilon = 0.0;
    double gamma = 0.0;
};

/// Piecewise-linear omega(t) through (t, omega) nodes.
struct Tabulated {
    std::vector<std::pair<double, double>> nodes;
};

using FrequencyLaw = std::variant<Free, ConstantOmega, RampOmega, ModulatedOmega, Tabulated>;

/// Hamiltonian H = p^2/2m + (m/2) omega(t)^2 x^2.
class SystemSpec {
  public:
    SystemSpec() = default;
    SystemSpec(Constants constants, FrequencyLaw law);

    const Constants& constants() const noexcept { return constants_; }
    const FrequencyLaw& frequency_law() const noexcept { return law_; }

    /// True for Free and ConstantOmega (closed-form solutions exist).
    bool has_constant_frequency() const noexcept;
    bool is_free() const noexcept;

  private:
    Constants constants_;
    FrequencyLaw law_ = Free{};
};

/// Minimum-uncertainty Gaussian at t = 0, centred at (x0, p0).
/// alpha0^2 = 2 m <x~^2>_0 / hbar.
class InitialPacket {
  public:
    InitialPacket(double x0, double p0, double alpha0);

    double x0() const noexcept { return x0_; }
    double p0() const noexcept { return p0_; }
    double alpha0() const noexcept { return alpha0_; }
    /// Prefactor parameter of the initial Gaussian, 1/alpha0^2.
    double beta0() const noexcept { return 1.0 / (alpha0_ * alpha0_); }

  private:
    double x0_;
    double p0_;
    double alpha0_;
};

struct InitialVariances {
    double var_x;
    double var_p;
};

double omega_at(const SystemSpec& system, double t);

/// Position and momentum variances of the initial packet.
InitialVariances validate_packet(const InitialPacket& packet, const Constants& c);

}  // namespace wpdyn

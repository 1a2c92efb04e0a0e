#include "wpdyn/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wpdyn/errors.hpp"

namespace wpdyn {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
}

struct LawValidator {
    void operator()(const Free&) const {}
    void operator()(const ConstantOmega& law) const {
        require_finite(law.omega, "omega");
        if (law.omega < 0.0) throw ConfigError("omega must be non-negative");
    }
    void operator()(const RampOmega& law) const {
        require_finite(law.omega0, "ramp omega0");
        require_finite(law.slope, "ramp slope");
    }
    void operator()(const ModulatedOmega& law) const {
        require_finite(law.omega0, "modulated omega0");
        require_finite(law.epsilon, "modulated epsilon");
        require_finite(law.gamma, "modulated gamma");
    }
    void operator()(const Tabulated& law) const {
        if (law.nodes.size() < 2) throw ConfigError("tabulated omega needs at least two nodes");
        for (std::size_t i = 0; i < law.nodes.size(); ++i) {
            require_finite(law.nodes[i].first, "tabulated time");
            require_finite(law.nodes[i].second, "tabulated omega");
            if (i > 0 && !(law.nodes[i].first > law.nodes[i - 1].first))
                throw ConfigError("tabulated times must be strictly increasing");
        }
    }
};

double interpolate(const Tabulated& law, double t) {
    const auto& nodes = law.nodes;
    if (t < nodes.front().first || t > nodes.back().first)
        throw RangeError("t = " + std::to_string(t) + " outside tabulated omega range [" +
                         std::to_string(nodes.front().first) + ", " +
                         std::to_string(nodes.back().first) + "]");
    auto hi = std::upper_bound(nodes.begin(), nodes.end(), t,
                               [](double v, const auto& node) { return v < node.first; });
    if (hi == nodes.end()) return nodes.back().second;
    auto lo = std::prev(hi);
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

}  // namespace

Constants::Constants(double hbar, double mass) : hbar_(hbar), mass_(mass) {
    if (!(std::isfinite(hbar) && hbar > 0.0)) throw ConfigError("hbar must be positive and finite");
    if (!(std::isfinite(mass) && mass > 0.0)) throw ConfigError("mass must be positive and finite");
}

SystemSpec::SystemSpec(Constants constants, FrequencyLaw law)
    : constants_(constants), law_(std::move(law)) {
    std::visit(LawValidator{}, law_);
}

bool SystemSpec::has_constant_frequency() const noexcept {
    return std::holds_alternative<Free>(law_) || std::holds_alternative<ConstantOmega>(law_);
}

bool SystemSpec::is_free() const noexcept {
    if (std::holds_alternative<Free>(law_)) return true;
    if (const auto* c = std::get_if<ConstantOmega>(&law_)) return c->omega == 0.0;
    return false;
}

InitialPacket::InitialPacket(double x0, double p0, double alpha0)
    : x0_(x0), p0_(p0), alpha0_(alpha0) {
    require_finite(x0, "x0");
    require_finite(p0, "p0");
    if (!(std::isfinite(alpha0) && alpha0 > 0.0))
        throw ConfigError("alpha0 must be positive and finite");
}

double omega_at(const SystemSpec& system, double t) {
    if (!std::isfinite(t)) throw RangeError("omega_at: t must be finite");
    struct Eval {
        double t;
        double operator()(const Free&) const { return 0.0; }
        double operator()(const ConstantOmega& l) const { return l.omega; }
        double operator()(const RampOmega& l) const { return l.omega0 + l.slope * t; }
        double operator()(const ModulatedOmega& l) const {
            return l.omega0 * (1.0 + l.epsilon * std::cos(l.gamma * t));
        }
        double operator()(const Tabulated& l) const { return interpolate(l, t); }
    };
    return std::visit(Eval{t}, system.frequency_law());
}

InitialVariances validate_packet(const InitialPacket& packet, const Constants& c) {
    const double a2 = packet.alpha0() * packet.alpha0();
    return {c.hbar() * a2 / (2.0 * c.mass()), c.hbar() * c.mass() / (2.0 * a2)};
}

}  // namespace wpdyn

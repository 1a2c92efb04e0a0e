#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "wpdyn/core.hpp"

namespace wpdyn {

using cplx = std::complex<double>;

/// Soft warnings attached to a computed grid. They never abort a computation.
struct GridDiagnostics {
    bool coverage_warning = false;
    bool aliasing_warning = false;
    /// Estimated probability mass not represented by the grid.
    double outside_mass = 0.0;
    std::vector<std::string> notes;

    void merge(const GridDiagnostics& other);
};

/// Uniform position grid x_i = x_min + i dx.
struct UniformAxis {
    double min = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    double at(std::size_t i) const noexcept { return min + static_cast<double>(i) * step; }
    double max() const noexcept { return at(count == 0 ? 0 : count - 1); }

    /// n points on [lo, hi], both ends included.
    static UniformAxis closed(double lo, double hi, std::size_t n);
    /// n points starting at centre - half_width with step 2*half_width/n, so centre is a node
    /// when n is even.
    static UniformAxis centred(double centre, double half_width, std::size_t n);
};

struct ComplexGrid {
    double x_min = 0.0;
    double dx = 1.0;
    std::vector<cplx> values;
    GridDiagnostics diagnostics;

    ComplexGrid() = default;
    ComplexGrid(double x_min, double dx, std::vector<cplx> values);
    ComplexGrid(const UniformAxis& axis, std::vector<cplx> values);

    std::size_t size() const noexcept { return values.size(); }
    double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx; }
    UniformAxis axis() const noexcept { return {x_min, dx, values.size()}; }

    /// Trapezoid integral of |psi|^2.
    double norm_squared() const;
    /// Cubic Lagrange interpolation; zero outside the grid.
    cplx interpolate(double x) const;
    bool same_axis(const ComplexGrid& other, double rel_tol = 1e-12) const;
};

/// Rows = p index, columns = x index.
struct PhaseSpaceGrid {
    UniformAxis x;
    UniformAxis p;
    std::vector<double> values;
    GridDiagnostics diagnostics;

    PhaseSpaceGrid(UniformAxis x_axis, UniformAxis p_axis);

    double& at(std::size_t ip, std::size_t ix) { return values[ip * x.count + ix]; }
    double at(std::size_t ip, std::size_t ix) const { return values[ip * x.count + ix]; }

    double integral() const;
    /// Integral over p for each x column.
    std::vector<double> marginal_x() const;
    /// Integral over x for each p row.
    std::vector<double> marginal_p() const;
    double min_value() const;
    double max_abs_difference(const PhaseSpaceGrid& other) const;
};

/// First and second moments of a gridded state, from quadrature.
struct GridMoments {
    double norm = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
    /// <x~ p~ + p~ x~>
    double corr = 0.0;
};

/// Momentum-space derivatives are evaluated spectrally; the state must decay at the grid edges.
GridMoments grid_moments(const ComplexGrid& psi, const Constants& c);

/// sum conj(a) b dx
cplx inner_product(const ComplexGrid& a, const ComplexGrid& b);

/// Fraction of |psi|^2 within `edge_fraction` of either end of the grid.
double edge_mass(const ComplexGrid& psi, double edge_fraction);

}  // namespace wpdyn

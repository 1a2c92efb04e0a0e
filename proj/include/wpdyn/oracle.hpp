#pragma once

#include "wpdyn/core.hpp"
#include "wpdyn/grid.hpp"

namespace wpdyn {

/// Gridded wavefunction at time t. The grid size must be a power of two for split_step.
struct GridState {
    ComplexGrid grid;
    double t = 0.0;
};

/// Strang-split propagation
///   exp(-i V dt / 2 hbar) exp(-i T dt / hbar) exp(-i V dt / 2 hbar)
/// with V = (m/2) omega(t + dt/2)^2 x^2 and T applied in momentum space.
///
/// Throws ResolutionError if the input carries more than 1e-10 of its momentum-space weight in
/// the outer quarter of the FFT band, DivergenceError on non-finite values. Sets the coverage
/// warning when less than 1 - 1e-10 of the mass lies in the central half of the domain.
GridState split_step(const GridState& state, const SystemSpec& system, double dt, long steps);

struct MomentErrors {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
    double corr = 0.0;

    double max() const noexcept;
};

struct StateComparison {
    double l2_error = 0.0;
    /// min over theta of || a - exp(i theta) b ||
    double phase_aligned_l2_error = 0.0;
    MomentErrors moment_errors;
};

/// Throws ValidationError if the grids differ.
StateComparison compare_states(const GridState& a, const GridState& b, const Constants& c);

}  // namespace wpdyn

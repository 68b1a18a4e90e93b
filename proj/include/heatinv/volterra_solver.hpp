#pragma once

#include <cstddef>
#include <vector>

#include "heatinv/kernel_field.hpp"
#include "heatinv/kernel_recovery.hpp"
#include "heatinv/potential.hpp"

namespace heatinv {

/// U = (q, K) on a shared grid x_i = i h, h = 1/(n-1).
struct IterationState {
    std::vector<double> q;
    KernelField k;

    std::size_t size() const noexcept { return q.size(); }
};

/// f(x) = 2 [K_y(1, 2x-1) + K_x(1, 2x-1)]
/// g(x,y) = [K(1, y+x-1) + K(1, y-x+1)] / 2 - 1/2 int_{y+x-1}^{y-x+1} K_x(1,t) dt
/// with K(1,.) and K_x(1,.) extended oddly and K_y(1,.) evenly to [-1,0).
struct SourceTerm {
    std::vector<double> f;
    KernelField g;
};

SourceTerm build_source(const BoundaryKernel& bk);

/// W(U) = ( -2 int_x^1 q(s) K(s, 2x-s) ds ,
///          1/2 int_x^1 q(s) int_{y-(s-x)}^{y+(s-x)} K(s,t) dt ds )
IterationState apply_W(const IterationState& state);

struct FixedPointOptions {
    double tol = 1e-8;
    std::size_t max_iter = 100;
    /// Iterations skipped before the contraction ratio is measured.
    std::size_t burn_in = 3;
};

struct FixedPointResult {
    IterationState state;
    /// sup-norm of U_{n+1} - U_n over both components
    std::vector<double> norms;
    /// max ratio of successive update norms after burn-in (0 if too few iterations)
    double contraction = 0.0;
    /// ||U - W(U) - h||_sup at the returned state
    double fixed_point_residual = 0.0;
    std::size_t iterations = 0;
};

/// U_{n+1} = W(U_n) + (f, g), U_0 = (f, g). Throws NonConvergence or
/// Divergence with the norm history as details.
FixedPointResult solve_fixed_point(const SourceTerm& source, const FixedPointOptions& opts = {});

struct ExtractedPotential {
    Potential q{std::vector<double>(3, 0.0)};
    /// max |q(x) - 2 d/dx K(x,x)|
    double diagonal_residual = 0.0;
};

ExtractedPotential extract_potential(const IterationState& state);

}  // namespace heatinv

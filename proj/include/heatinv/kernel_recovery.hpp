#pragma once

#include <cstddef>
#include <vector>

#include "heatinv/potential.hpp"

namespace heatinv {

/// Normal equations of a basis of free solutions phi0(., nu_j).
struct GramSystem {
    std::size_t size = 0;
    /// Row-major size x size, entries (phi0_i, phi0_j) on [0,1].
    std::vector<double> matrix;
    std::vector<double> rhs;
    /// 2-norm condition number of the unit-diagonal scaled matrix.
    double condition_estimate = 0.0;
    bool ill_conditioned = false;

    double operator()(std::size_t i, std::size_t j) const { return matrix[i * size + j]; }
};

/// f(y) = linear_coeff * y + sum_j coeffs[j] * phi0(y, nus[j])
struct BasisExpansion {
    std::vector<double> nus;
    std::vector<double> coeffs;
    double linear_coeff = 0.0;

    double value(double y) const;
    double derivative(double y) const;
};

struct RecoveryOptions {
    /// Equations are supplied up to index tail_factor * J from the fitted
    /// asymptotics nu_j ~ (w_j pi)^2 + a + b / w_j^2. 1 disables the tail.
    std::size_t tail_factor = 8;
    /// Add the y term and pin K(1,1) to a/2.
    bool endpoint_constraint = true;
    /// Added to the diagonal of the scaled Gram matrix.
    double ridge = 0.0;
    double condition_ceiling = 1e3;
    /// Asymptotic fit uses indices j > fit_fraction * J.
    double fit_fraction = 0.5;
};

struct AsymptoticFit {
    double a = 0.0;
    double b = 0.0;
};

/// Least-squares fit of nu_j - (w_j pi)^2 to a + b / w_j^2, w_j = j - offset.
AsymptoticFit fit_asymptotics(const std::vector<double>& nus, double offset, double fit_fraction = 0.5);

struct K1Recovery {
    BasisExpansion expansion;
    GramSystem gram;
    /// Estimate of the integral of q from the Dirichlet asymptotics.
    double mean_estimate = 0.0;
    double k11 = 0.0;
    /// int_0^1 K(1,y) phi0(y, lambda_j) dy + phi0(1, lambda_j) for the given j <= J
    std::vector<double> residuals;
};

struct K1xRecovery {
    BasisExpansion expansion;
    GramSystem gram;
    /// Same for the Dirichlet-Neumann equations.
    std::vector<double> residuals;
};

K1Recovery recover_K1(const std::vector<double>& dirichlet, const RecoveryOptions& opts = {});

K1xRecovery recover_K1x(const std::vector<double>& dirichlet_neumann, const K1Recovery& k1,
                        const RecoveryOptions& opts = {});

/// Boundary traces on y_i = i / (n_nodes - 1).
struct BoundaryKernel {
    std::size_t n_nodes = 0;
    std::vector<double> K1;
    std::vector<double> K1x;
    std::vector<double> K1y;
    std::vector<double> coeffs_c;
    std::vector<double> coeffs_d;
};

BoundaryKernel sample_boundary(const K1Recovery& k1, const K1xRecovery& k1x, std::size_t n_nodes);

/// Boundary traces of the Goursat kernel of q; Kx from rows past x = 1,
/// Ky by differences along the last row.
BoundaryKernel goursat_boundary(const Potential& q);

}  // namespace heatinv

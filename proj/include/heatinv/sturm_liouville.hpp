#pragma once

#include <cstddef>
#include <vector>

#include "heatinv/kernel_field.hpp"
#include "heatinv/potential.hpp"

namespace heatinv {

// All spectra are eigenvalues nu of L = -d^2/dx^2 + q on [0,1]. phi(x, nu)
// solves -phi'' + q phi = nu phi with phi(0) = 0, phi'(0) = 1.

struct PhiOptions {
    bool keep_profile = false;
    /// Upper bound on sqrt(|nu| + max|q|) * substep; sets the RK4 substep count.
    double max_phase_step = 2.5e-3;
    /// Hard cap on the total number of RK4 steps per evaluation.
    std::size_t max_total_steps = 50'000'000;
};

struct PhiEvaluation {
    double nu = 0.0;
    double phi_end = 0.0;   // phi(1, nu)
    double dphi_end = 0.0;  // phi'(1, nu)
    /// Integral of phi^2 over [0,1].
    double norm_sq = 0.0;
    /// Sign changes of phi on (0, 1).
    int node_count = 0;
    /// phi and phi' at the potential grid nodes (only with keep_profile).
    std::vector<double> profile;
    std::vector<double> dprofile;
};

PhiEvaluation solve_phi(const Potential& q, double nu, const PhiOptions& opts = {});

struct SpectralPair {
    std::vector<double> dirichlet;          // lambda_j: phi(1, lambda_j) = 0
    std::vector<double> dirichlet_neumann;  // mu_j:     phi'(1, mu_j) = 0
    std::size_t count() const noexcept { return dirichlet.size(); }
};

struct SpectraOptions {
    double root_tol = 1e-10;
    /// Bracket growth per retry, as a fraction of the current width.
    double expand_fraction = 0.25;
    int max_expansions = 8;
    /// Seed brackets at the free values without the mean(q) shift.
    bool seed_free = false;
    PhiOptions phi;
};

SpectralPair compute_spectra(const Potential& q, std::size_t j_max, const SpectraOptions& opts = {});

/// Free spectra lambda_j = (j pi)^2, mu_j = ((j - 1/2) pi)^2, shifted by c.
SpectralPair free_spectra(std::size_t j_max, double shift = 0.0);

/// Transformation kernel from the Goursat problem
///   K_xx - K_yy = q(x) K,  K(x, x) = 1/2 int_0^x q,  K(x, 0) = 0,
/// marched in characteristic coordinates (second order).
KernelField goursat_kernel(const Potential& q);

/// |phi(1,nu) - [phi0(1,nu) + int_0^1 K(1,y) phi0(y,nu) dy]| with K from goursat_kernel.
double check_transmutation(const Potential& q, double nu);

/// Goursat march on an arbitrary node count with the given step; rows beyond
/// x = 1 use the linearly extended potential. Used by the boundary oracle.
KernelField goursat_kernel_extended(const Potential& q, std::size_t extra_nodes);

}  // namespace heatinv

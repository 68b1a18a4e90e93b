#pragma once

#include <cstddef>
#include <vector>

#include "heatinv/potential.hpp"
#include "heatinv/sturm_liouville.hpp"

namespace heatinv {

enum class PulseShape { Polynomial, SineSquared, Zero };

/// Boundary temperature a(t) at x = 1, supported on [0, support].
///   Polynomial:  amplitude * t^2 (T - t)^2
///   SineSquared: amplitude * sin^2(pi t / T)
struct PulseSpec {
    PulseShape shape = PulseShape::Polynomial;
    double support = 0.2;
    double amplitude = 1.0;

    double value(double t) const noexcept;
    bool is_zero() const noexcept { return shape == PulseShape::Zero || amplitude == 0.0; }
};

struct PulseRecord {
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> b;   // u_x(1, t)
    std::vector<double> b0;  // u_x(0, t)
    double support = 0.0;
    std::vector<double> probe_x;
    /// probe_u[k][m] = u(probe_x[k], t[m])
    std::vector<std::vector<double>> probe_u;
    /// Set when the late-time flux grows (negative eigenvalue present).
    bool growth_detected = false;
};

struct SimulationOptions {
    std::vector<double> probes;
    /// Upper bound on dt / h^2.
    double max_ratio = 1000.0;
};

/// Crank-Nicolson for u_t = u_xx - q u, u(x,0) = 0, u(0,t) = 0, u(1,t) = a(t)
/// on the potential grid; fluxes by three-point one-sided differences.
PulseRecord simulate(const Potential& q, const PulseSpec& pulse, double t_end, std::size_t m_steps,
                     const SimulationOptions& opts = {});

/// max(5 T, 3 / lambda_min)
double default_t_end(double support, const std::vector<double>& lambdas);

struct LaplaceSample {
    double lambda = 0.0;
    double A = 0.0;
    double B = 0.0;
    double B0 = 0.0;
    /// exp(-lambda t_end) * max|b|
    double tail_estimate = 0.0;
    bool truncation_warning = false;
    /// Transforms of the probe series, same order as PulseRecord::probe_x.
    std::vector<double> probe_values;
};

/// Trapezoid quadrature of int_0^t_end exp(-lambda t) (.) dt. lambda = 0 is allowed.
LaplaceSample laplace_transform(const PulseRecord& record, double lambda, double tail_tol = 1e-6);

/// Unit-norm Dirichlet eigenfunctions psi_j on the potential grid.
struct DirichletModes {
    std::vector<double> eigenvalues;
    std::vector<double> dpsi_end;  // psi_j'(1)
    std::vector<std::vector<double>> psi;
    std::vector<std::vector<double>> dpsi;
    double step = 0.0;
};

DirichletModes dirichlet_modes(const Potential& q, const std::vector<double>& eigenvalues,
                               const PhiOptions& opts = {});

struct ModalOptions {
    /// Subtract the series at a reference lambda and add back its closed form.
    bool accelerate = true;
    double pole_tol = 1e-8;
};

/// v(x, lambda) = -sum_j A psi_j'(1) psi_j(x) / (lambda + lambda_j)
double modal_v(const Potential& q, const DirichletModes& modes, double A, double lambda, double x,
               const ModalOptions& opts = {});

}  // namespace heatinv

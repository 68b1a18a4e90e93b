#pragma once

// Free solution phi0(x, nu) = sin(sqrt(nu) x) / sqrt(nu) of -phi'' = nu phi,
// phi(0) = 0, phi'(0) = 1, taken through its entire extension in nu:
// x at nu = 0 and sinh(sqrt(-nu) x) / sqrt(-nu) for nu < 0.

namespace heatinv::free_basis {

double phi0(double nu, double x) noexcept;

/// d/dx phi0(x, nu) = cos(sqrt(nu) x)
double dphi0(double nu, double x) noexcept;

/// Integral over [0,1] of phi0(., nu_a) * phi0(., nu_b), closed form.
double inner(double nu_a, double nu_b) noexcept;

/// Integral over [0,1] of y * phi0(y, nu), closed form.
double moment_y(double nu) noexcept;

}  // namespace heatinv::free_basis

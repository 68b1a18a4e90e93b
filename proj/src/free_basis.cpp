#include "heatinv/free_basis.hpp"

#include <cmath>
#include <complex>

namespace heatinv::free_basis {
namespace {

using cplx = std::complex<double>;

constexpr double kTiny = 1e-7;

cplx root(double nu) { return std::sqrt(cplx(nu, 0.0)); }

cplx sinc(cplx z) {
    if (std::abs(z) < 1e-4) {
        const cplx z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

// (sin k - k cos k) / k^3, the y-moment of sin(k y)/k
cplx moment(cplx k) {
    if (std::abs(k) < 1e-2) {
        const cplx k2 = k * k;
        return 1.0 / 3.0 - k2 / 30.0 + k2 * k2 / 840.0;
    }
    return (std::sin(k) - k * std::cos(k)) / (k * k * k);
}

}  // namespace

double phi0(double nu, double x) noexcept {
    if (nu > 0.0) {
        const double k = std::sqrt(nu);
        return k * x < 1e-8 ? x : std::sin(k * x) / k;
    }
    if (nu < 0.0) {
        const double k = std::sqrt(-nu);
        return k * x < 1e-8 ? x : std::sinh(k * x) / k;
    }
    return x;
}

double dphi0(double nu, double x) noexcept {
    if (nu > 0.0) return std::cos(std::sqrt(nu) * x);
    if (nu < 0.0) return std::cosh(std::sqrt(-nu) * x);
    return 1.0;
}

double moment_y(double nu) noexcept { return moment(root(nu)).real(); }

double inner(double nu_a, double nu_b) noexcept {
    const cplx a = root(nu_a);
    const cplx b = root(nu_b);
    const bool a_small = std::abs(a) < kTiny;
    const bool b_small = std::abs(b) < kTiny;
    if (a_small && b_small) return 1.0 / 3.0;
    if (a_small) return moment(b).real();
    if (b_small) return moment(a).real();
    // sin(ay) sin(by) = [cos((a-b)y) - cos((a+b)y)] / 2
    return ((sinc(a - b) - sinc(a + b)) / (2.0 * a * b)).real();
}

}  // namespace heatinv::free_basis

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "heatinv/error.hpp"
#include "heatinv/free_basis.hpp"
#include "heatinv/kernel_recovery.hpp"
#include "heatinv/sturm_liouville.hpp"

using namespace heatinv;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

double max_err(const std::vector<double>& a, const std::vector<double>& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

double max_abs(const std::vector<double>& a) {
    double e = 0.0;
    for (double v : a) e = std::max(e, std::abs(v));
    return e;
}

struct Recovered {
    K1Recovery k1;
    K1xRecovery k1x;
    BoundaryKernel bk;
};

Recovered recover(const Potential& q, std::size_t J, std::size_t n = 201) {
    const auto sp = compute_spectra(q, J);
    Recovered r{recover_K1(sp.dirichlet), {}, {}};
    r.k1x = recover_K1x(sp.dirichlet_neumann, r.k1);
    r.bk = sample_boundary(r.k1, r.k1x, n);
    return r;
}

Potential sine2(std::size_t n) {
    return Potential::from_function(n, [](double x) { return std::sin(2 * pi * x); });
}

}  // namespace

TEST_CASE("free basis closed forms", "[kernel]") {
    CHECK_THAT(free_basis::phi0(4.0, 0.5), WithinAbs(std::sin(1.0) / 2.0, 1e-15));
    CHECK_THAT(free_basis::phi0(-4.0, 0.5), WithinAbs(std::sinh(1.0) / 2.0, 1e-15));
    CHECK_THAT(free_basis::phi0(0.0, 0.3), WithinAbs(0.3, 1e-15));
    // int_0^1 sin(a y) sin(b y) / (a b)
    const double a = 2.0, b = 3.0;
    const double ref = (std::sin(a - b) / (a - b) - std::sin(a + b) / (a + b)) / (2 * a * b);
    CHECK_THAT(free_basis::inner(a * a, b * b), WithinAbs(ref, 1e-14));
    CHECK_THAT(free_basis::inner(a * a, a * a), WithinAbs((0.5 - std::sin(2 * a) / (4 * a)) / (a * a), 1e-14));
    CHECK_THAT(free_basis::moment_y(0.0), WithinAbs(1.0 / 3.0, 1e-15));
}

TEST_CASE("asymptotic fit is exact on model data", "[kernel]") {
    std::vector<double> lam, mu;
    for (int j = 1; j <= 16; ++j) {
        lam.push_back(std::pow(j * pi, 2) + 0.7 - 1.3 / (j * j));
        mu.push_back(std::pow((j - 0.5) * pi, 2) + 0.7 + 2.0 / ((j - 0.5) * (j - 0.5)));
    }
    const auto f = fit_asymptotics(lam, 0.0);
    CHECK_THAT(f.a, WithinAbs(0.7, 1e-9));
    CHECK_THAT(f.b, WithinAbs(-1.3, 1e-7));
    const auto g = fit_asymptotics(mu, 0.5);
    CHECK_THAT(g.a, WithinAbs(0.7, 1e-9));
    CHECK_THAT(g.b, WithinAbs(2.0, 1e-7));
}

TEST_CASE("free spectra give a zero kernel", "[kernel]") {
    const auto sp = free_spectra(10);
    const auto k1 = recover_K1(sp.dirichlet);
    const auto k1x = recover_K1x(sp.dirichlet_neumann, k1);
    const auto bk = sample_boundary(k1, k1x, 101);
    CHECK(max_abs(bk.K1) < 1e-10);
    CHECK(max_abs(bk.K1x) < 1e-9);
    CHECK(std::abs(k1.mean_estimate) < 1e-10);
}

TEST_CASE("Gram system is symmetric and well conditioned", "[kernel]") {
    const auto r = recover(sine2(201), 16);
    const auto& g = r.k1.gram;
    for (std::size_t i = 0; i < g.size; ++i) {
        CHECK(g(i, i) > 0.0);
        for (std::size_t j = 0; j < i; ++j) CHECK(g(i, j) == g(j, i));
    }
    CHECK(g.condition_estimate >= 1.0);
    CHECK(g.condition_estimate < 1e3);
    CHECK(r.k1x.gram.condition_estimate < 1e3);
    CHECK_FALSE(g.ill_conditioned);
}

TEST_CASE("constant potential boundary kernel against the Bessel closed form", "[kernel]") {
    const double c = 2.0;
    const auto r = recover(Potential::constant(201, c), 16);
    std::vector<double> k1, kx;
    for (std::size_t i = 0; i < 201; ++i) {
        const double y = i / 200.0, z = std::sqrt(c * (1 - y * y));
        k1.push_back(z < 1e-8 ? c * y / 2 : c * y * std::cyl_bessel_i(1.0, z) / z);
        kx.push_back(z < 1e-8 ? c * c * y / 8 : c * c * y * std::cyl_bessel_i(2.0, z) / (z * z));
    }
    CHECK(max_err(r.bk.K1, k1) < 5e-3);
    CHECK(max_err(r.bk.K1x, kx) < 3e-2);
    for (double v : r.k1.residuals) CHECK(std::abs(v) < 1e-10);
    for (double v : r.k1x.residuals) CHECK(std::abs(v) < 1e-10);
    CHECK_THAT(2.0 * r.k1.k11, WithinAbs(c, 1e-2));
}

TEST_CASE("sine potential boundary kernel against the Goursat oracle", "[kernel]") {
    const Potential q = sine2(201);
    const auto r = recover(q, 16);
    const auto oracle = goursat_boundary(q);
    CHECK(max_err(r.bk.K1, oracle.K1) < 5e-3);
    CHECK(max_err(r.bk.K1x, oracle.K1x) < 3e-2);
    for (double v : r.k1.residuals) CHECK(std::abs(v) < 1e-10);
    for (double v : r.k1x.residuals) CHECK(std::abs(v) < 1e-10);
    CHECK(std::abs(2.0 * r.k1.k11 - q.integral()) < 1e-2);
    CHECK(std::abs(r.k1.mean_estimate - q.integral()) < 1e-2);
}

TEST_CASE("Goursat oracle traces of a constant potential", "[kernel]") {
    const double c = 1.0;
    const auto bk = goursat_boundary(Potential::constant(401, c));
    double e1 = 0.0, ex = 0.0, ey = 0.0;
    for (std::size_t i = 0; i < bk.n_nodes; ++i) {
        const double y = i / 400.0, z = std::sqrt(c * (1 - y * y));
        const double i1 = z < 1e-8 ? 0.5 : std::cyl_bessel_i(1.0, z) / z;
        const double i2 = z < 1e-8 ? 0.125 : std::cyl_bessel_i(2.0, z) / (z * z);
        e1 = std::max(e1, std::abs(bk.K1[i] - c * y * i1));
        ex = std::max(ex, std::abs(bk.K1x[i] - c * c * y * i2));
        ey = std::max(ey, std::abs(bk.K1y[i] - (c * i1 - c * c * y * y * i2)));
    }
    CHECK(e1 < 1e-6);
    CHECK(ex < 1e-4);
    CHECK(ey < 1e-4);
}

TEST_CASE("boundary error decreases with J", "[kernel][property]") {
    const Potential q = Potential::from_function(201, [](double x) { return 1.0 + std::cos(pi * x); });
    const auto oracle = goursat_boundary(q);
    const double e8 = max_err(recover(q, 8).bk.K1, oracle.K1);
    const double e16 = max_err(recover(q, 16).bk.K1, oracle.K1);
    CHECK(e16 < e8);
}

TEST_CASE("endpoint constraint pins K(1,1) to half the fitted mean", "[kernel][property]") {
    const auto sp = compute_spectra(sine2(201), 12);
    const auto k1 = recover_K1(sp.dirichlet);
    CHECK_THAT(k1.expansion.value(1.0), WithinAbs(k1.k11, 1e-12));
    CHECK_THAT(k1.k11, WithinAbs(0.5 * k1.mean_estimate, 1e-12));
    CHECK(k1.expansion.value(0.0) == 0.0);
}

TEST_CASE("invalid spectra are rejected", "[kernel]") {
    std::vector<double> lam{9.87, 9.87, 88.8, 157.9};
    try {
        recover_K1(lam);
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
    CHECK_THROWS_AS(recover_K1({}), Error);
    RecoveryOptions o;
    o.tail_factor = 0;
    CHECK_THROWS_AS(recover_K1(free_spectra(6).dirichlet, o), Error);
}

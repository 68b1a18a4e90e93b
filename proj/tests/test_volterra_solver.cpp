#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "heatinv/error.hpp"
#include "heatinv/kernel_recovery.hpp"
#include "heatinv/volterra_solver.hpp"

using namespace heatinv;
using Catch::Matchers::WithinAbs;

namespace {

// K(x,y) = c y I1(z)/z, z = sqrt(c (x^2 - y^2)) for q = c
double bessel_kernel(double c, double x, double y) {
    const double z = std::sqrt(c * (x * x - y * y));
    return z < 1e-8 ? c * y / 2 : c * y * std::cyl_bessel_i(1.0, z) / z;
}

double grid_g(const KernelField& g, double x, double y) {
    const double N = static_cast<double>(g.size() - 1);
    return g.at(static_cast<std::size_t>(std::lround(x * N)), std::lround(y * N));
}

}  // namespace

TEST_CASE("zero boundary data is a fixed point at zero", "[volterra]") {
    BoundaryKernel bk;
    bk.n_nodes = 51;
    bk.K1.assign(51, 0.0);
    bk.K1x.assign(51, 0.0);
    bk.K1y.assign(51, 0.0);
    const auto src = build_source(bk);
    const auto res = solve_fixed_point(src);
    CHECK(res.iterations == 1);
    CHECK(res.norms.front() == 0.0);
    for (double v : res.state.q) CHECK(v == 0.0);
}

TEST_CASE("source terms at the right end", "[volterra]") {
    const auto bk = goursat_boundary(Potential::constant(201, 1.0));
    const auto src = build_source(bk);
    // f(1) = 2 (K_y + K_x)(1,1) = q(1)
    CHECK_THAT(src.f.back(), WithinAbs(1.0, 1e-3));
    for (std::size_t j = 0; j < 201; ++j) CHECK(src.g.at(200, static_cast<std::ptrdiff_t>(j)) == bk.K1[j]);
}

TEST_CASE("source g is resolution independent", "[volterra]") {
    const auto a = build_source(goursat_boundary(Potential::constant(201, 1.0)));
    const auto b = build_source(goursat_boundary(Potential::constant(401, 1.0)));
    CHECK(std::abs(grid_g(a.g, 0.75, 0.5) - grid_g(b.g, 0.75, 0.5)) < 1e-4);
    CHECK(std::abs(grid_g(a.g, 0.5, 0.1) - grid_g(b.g, 0.5, 0.1)) < 1e-4);
}

TEST_CASE("apply_W against fine quadrature", "[volterra]") {
    const std::size_t n = 201;
    const double c = 1.0;
    IterationState s;
    s.q.assign(n, c);
    s.k = KernelField(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) s.k.ref(i, j) = bessel_kernel(c, i / 200.0, j / 200.0);
    const auto w = apply_W(s);
    // -2 int_x^1 c K(s, 2x - s) ds at x = 0.9, Simpson on 2000 panels
    const double x = 0.9;
    const int m = 2000;
    double acc = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double t = x + (1 - x) * k / m;
        const double wt = (k == 0 || k == m) ? 1 : (k % 2 ? 4 : 2);
        acc += wt * c * bessel_kernel(c, t, 2 * x - t);
    }
    const double ref = -2.0 * acc * (1 - x) / (3.0 * m);
    CHECK_THAT(w.q[180], WithinAbs(ref, 1e-5));
    CHECK(w.q[200] == 0.0);
    for (std::size_t j = 0; j <= 200; ++j) CHECK(w.k.at(200, static_cast<std::ptrdiff_t>(j)) == 0.0);
}

TEST_CASE("oracle boundary data of q = 1 converges geometrically to q", "[volterra]") {
    const auto src = build_source(goursat_boundary(Potential::constant(201, 1.0)));
    FixedPointOptions o;
    const auto res = solve_fixed_point(src, o);
    CHECK(res.contraction <= 0.9);
    CHECK(res.contraction > 0.0);
    CHECK(res.fixed_point_residual <= 2.0 * o.tol);
    CHECK(res.norms.back() < o.tol);
    double err = 0.0;
    for (double v : res.state.q) err = std::max(err, std::abs(v - 1.0));
    CHECK(err < 2e-2);
    const auto ex = extract_potential(res.state);
    CHECK(ex.diagonal_residual < 5e-2);
    // kernel of the fixed point matches the Bessel closed form
    double kerr = 0.0;
    for (std::size_t i = 0; i < 201; i += 10)
        for (std::size_t j = 0; j <= i; j += 10)
            kerr = std::max(kerr, std::abs(res.state.k.at(i, static_cast<std::ptrdiff_t>(j)) -
                                           bessel_kernel(1.0, i / 200.0, j / 200.0)));
    CHECK(kerr < 1e-3);
}

TEST_CASE("q at x depends only on boundary data on [2x-1, 1]", "[volterra][property]") {
    const Potential q = Potential::from_function(201, [](double x) { return 1.0 + x * x; });
    const auto bk = goursat_boundary(q);
    auto bumped = bk;
    const double delta = 0.3;
    for (std::size_t j = 0; j < 201; ++j) {
        const double y = j / 200.0;
        if (y < delta) {
            const double b = std::sin(3.14159 * y / delta);
            bumped.K1[j] += 0.05 * b * y;
            bumped.K1x[j] += 0.1 * b;
            bumped.K1y[j] += 0.1 * b;
        }
    }
    FixedPointOptions o;
    o.tol = 1e-12;
    const auto a = solve_fixed_point(build_source(bk), o);
    const auto b = solve_fixed_point(build_source(bumped), o);
    double far = 0.0, near = 0.0;
    for (std::size_t i = 0; i < 201; ++i) {
        const double d = std::abs(a.state.q[i] - b.state.q[i]);
        if (i / 200.0 > 0.5 * (1 + delta) + 1e-9) far = std::max(far, d);
        else near = std::max(near, d);
    }
    CHECK(far < 1e-9);
    CHECK(near > 1e-3);
}

TEST_CASE("non-convergence is reported with the norm history", "[volterra]") {
    const auto src = build_source(goursat_boundary(Potential::constant(101, 1.0)));
    FixedPointOptions o;
    o.max_iter = 1;
    try {
        solve_fixed_point(src, o);
        FAIL("expected NonConvergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonConvergence);
        CHECK(e.details().size() == 1);
    }
}

TEST_CASE("non-finite data diverges loudly", "[volterra]") {
    auto bk = goursat_boundary(Potential::constant(101, 1.0));
    bk.K1[50] = std::numeric_limits<double>::quiet_NaN();
    try {
        solve_fixed_point(build_source(bk));
        FAIL("expected Divergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divergence);
    }
}

TEST_CASE("large potential is reported, not returned", "[volterra]") {
    const auto src = build_source(goursat_boundary(Potential::constant(101, 400.0)));
    FixedPointOptions o;
    o.max_iter = 200;
    try {
        solve_fixed_point(src, o);
        FAIL("expected a convergence failure");
    } catch (const Error& e) {
        CHECK((e.kind() == ErrorKind::Divergence || e.kind() == ErrorKind::NonConvergence));
        CHECK_FALSE(e.details().empty());
    }
}

TEST_CASE("mismatched boundary arrays are rejected", "[volterra]") {
    BoundaryKernel bk;
    bk.n_nodes = 11;
    bk.K1.assign(11, 0.0);
    bk.K1x.assign(10, 0.0);
    bk.K1y.assign(11, 0.0);
    CHECK_THROWS_AS(build_source(bk), Error);
}

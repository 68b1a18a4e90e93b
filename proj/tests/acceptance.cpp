// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heatinv/error.hpp"
#include "heatinv/heat_sim.hpp"
#include "heatinv/kernel_recovery.hpp"
#include "heatinv/pipeline.hpp"
#include "heatinv/sturm_liouville.hpp"
#include "heatinv/volterra_solver.hpp"

using namespace heatinv;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            note << " [failed: " << what << "]";
        }
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

RunReport roundtrip(const std::string& potential, std::size_t j_max, const std::string& tag) {
    ExperimentConfig c;
    c.set("potential", potential);
    c.set("j_max", std::to_string(j_max));
    c.set("n_nodes", "201");
    c.set("out", "acceptance_out/" + tag);
    return run_command(c, "roundtrip");
}

Potential random_smooth(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c[5];
    for (double& v : c) v = u(rng);
    auto f = [c](double x) {
        return c[0] + c[1] * x + c[2] * std::sin(pi * x) + c[3] * std::cos(2 * pi * x) + c[4] * std::sin(3 * pi * x);
    };
    const double m = Potential::from_function(n, f).max_abs();
    const double scale = 5.0 * std::abs(u(rng)) / std::max(m, 1e-12);
    return Potential::from_function(n, [&](double x) { return scale * f(x); });
}

double max_err(const std::vector<double>& a, const std::vector<double>& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

// 1
void free_case(Outcome& o) {
    const auto sp = compute_spectra(Potential::constant(201, 0.0), 10);
    double rel = 0.0;
    for (std::size_t j = 1; j <= 10; ++j) {
        rel = std::max(rel, std::abs(sp.dirichlet[j - 1] - std::pow(j * pi, 2)) / std::pow(j * pi, 2));
        rel = std::max(rel, std::abs(sp.dirichlet_neumann[j - 1] - std::pow((j - 0.5) * pi, 2)) /
                                std::pow((j - 0.5) * pi, 2));
    }
    const double qmax = roundtrip("0", 10, "free").metric("error_max");
    o.note << "eigen rel err " << sci(rel) << ", max|q| " << sci(qmax);
    o.require(rel < 1e-8, "eigenvalue relative error < 1e-8");
    o.require(qmax < 1e-6, "max|q| < 1e-6");
}

// 2
void shift_symmetry(Outcome& o) {
    for (double c : {-1.0, 2.0}) {
        const auto sp = compute_spectra(Potential::constant(201, c), 10);
        const auto fr = free_spectra(10, c);
        const double d = std::max(max_err(sp.dirichlet, fr.dirichlet), max_err(sp.dirichlet_neumann, fr.dirichlet_neumann));
        const double e = roundtrip(sci(c), 16, "shift").metric("error_max");
        o.note << (c < 0 ? "" : "; ") << "c=" << c << ": eigen " << sci(d) << ", q err " << sci(e);
        o.require(d < 1e-8, "eigenvalues within 1e-8 of free + c");
        o.require(e < 2e-2, "constant recovered within 2e-2");
    }
}

// 3
void interlacing(Outcome& o) {
    std::mt19937 rng(20240611);
    int violations = 0;
    for (int k = 0; k < 20; ++k) {
        const Potential q = random_smooth(rng, 201);
        const auto sp = compute_spectra(q, 13);
        for (std::size_t j = 0; j < 12; ++j)
            if (!(sp.dirichlet_neumann[j] < sp.dirichlet[j] && sp.dirichlet[j] < sp.dirichlet_neumann[j + 1]))
                ++violations;
    }
    o.note << "20 potentials, violations " << violations;
    o.require(violations == 0, "zero interlacing violations");
}

const std::vector<double> kLambdas{1.0, 2.0, 4.0, 8.0};

struct FluxRatios {
    double far = 0.0, near = 0.0, free_far = 0.0;
};

FluxRatios flux_ratios() {
    FluxRatios r;
    const double t_end = default_t_end(0.2, kLambdas);
    const Potential q = Potential::from_function(401, [](double x) { return 1.0 + x; });
    const auto rec = simulate(q, PulseSpec{}, t_end, 8000);
    const auto rec0 = simulate(Potential::constant(401, 0.0), PulseSpec{}, t_end, 8000);
    for (double lam : kLambdas) {
        const auto s = laplace_transform(rec, lam);
        const auto e = solve_phi(q, -lam);
        r.far = std::max(r.far, std::abs(s.B / s.A - e.dphi_end / e.phi_end) / std::abs(e.dphi_end / e.phi_end));
        r.near = std::max(r.near, std::abs(s.B0 / s.A - 1.0 / e.phi_end) * std::abs(e.phi_end));
        const auto s0 = laplace_transform(rec0, lam);
        const double ref = std::sqrt(lam) / std::tanh(std::sqrt(lam));
        r.free_far = std::max(r.free_far, std::abs(s0.B / s0.A - ref) / ref);
    }
    return r;
}

// 4
void ratio_identity(Outcome& o) {
    const auto r = flux_ratios();
    o.note << "q=1+x rel err " << sci(r.far) << ", free rel err " << sci(r.free_far);
    o.require(r.far < 1e-2, "B/A within 1e-2 of phi'/phi");
    o.require(r.free_far < 1e-2, "free B/A within 1e-2 of sqrt(l) coth sqrt(l)");
}

// 5
void near_flux(Outcome& o) {
    const auto r = flux_ratios();
    o.note << "q=1+x rel err " << sci(r.near);
    o.require(r.near < 1e-2, "B0/A within 1e-2 of 1/phi");
}

// 6
void nonuniqueness(Outcome& o) {
    const Potential q = Potential::from_function(201, [](double x) { return x; });
    const double tol = 1e-10;
    SpectraOptions so;
    so.root_tol = tol;
    const auto a = compute_spectra(q, 10, so);
    const auto b = compute_spectra(q.reflected(), 10, so);
    const double dl = max_err(a.dirichlet, b.dirichlet);
    const double dm = max_err(a.dirichlet_neumann, b.dirichlet_neumann);
    // independent Magnus-series value of mu_1(x) - mu_1(1-x)
    const double gap = a.dirichlet_neumann[0] - b.dirichlet_neumann[0];
    o.note << "lambda diff " << sci(dl) << ", mu diff " << sci(dm) << ", mu1 gap " << gap;
    o.require(dl < 1e-8, "Dirichlet spectra agree within 1e-8");
    o.require(dm > 10 * tol, "mixed spectra differ by more than 10x root tolerance");
    o.require(std::abs(gap - 0.40525004) < 1e-5, "mu1 gap matches the forward oracle");
}

struct KernelSuite {
    double k1 = 0.0, k1x = 0.0, resid = 0.0, cond = 0.0, mean = 0.0;
};

KernelSuite kernel_suite() {
    KernelSuite s;
    const std::vector<Potential> suite{Potential::constant(201, 2.0),
                                       Potential::from_function(201, [](double x) { return std::sin(2 * pi * x); })};
    for (const Potential& q : suite) {
        const auto sp = compute_spectra(q, 16);
        const auto k1 = recover_K1(sp.dirichlet);
        const auto k1x = recover_K1x(sp.dirichlet_neumann, k1);
        const auto bk = sample_boundary(k1, k1x, 201);
        const auto oracle = goursat_boundary(q);
        s.k1 = std::max(s.k1, max_err(bk.K1, oracle.K1));
        s.k1x = std::max(s.k1x, max_err(bk.K1x, oracle.K1x));
        for (double v : k1.residuals) s.resid = std::max(s.resid, std::abs(v));
        for (double v : k1x.residuals) s.resid = std::max(s.resid, std::abs(v));
        s.cond = std::max({s.cond, k1.gram.condition_estimate, k1x.gram.condition_estimate});
        s.mean = std::max(s.mean, std::abs(2.0 * k1.k11 - q.integral()));
    }
    return s;
}

// 7
void kernel_boundary(Outcome& o) {
    const auto s = kernel_suite();
    o.note << "K1 err " << sci(s.k1) << ", K1x err " << sci(s.k1x) << ", residual " << sci(s.resid) << ", cond "
           << sci(s.cond);
    o.require(s.k1 < 5e-3, "K(1,.) within 5e-3");
    o.require(s.k1x < 3e-2, "Kx(1,.) within 3e-2");
    o.require(s.resid < 1e-10, "moment residuals < 1e-10");
    o.require(s.cond < 1e3, "Gram condition < 1e3");
}

// 8
void volterra(Outcome& o) {
    const auto src = build_source(goursat_boundary(Potential::constant(201, 1.0)));
    const auto res = solve_fixed_point(src);
    double err = 0.0;
    for (double v : res.state.q) err = std::max(err, std::abs(v - 1.0));
    bool reported = false;
    try {
        FixedPointOptions one;
        one.max_iter = 1;
        solve_fixed_point(src, one);
    } catch (const Error& e) {
        reported = e.kind() == ErrorKind::NonConvergence;
    }
    o.note << res.iterations << " iterations, ratio " << sci(res.contraction) << ", q err " << sci(err);
    o.require(res.contraction <= 0.9, "contraction ratio <= 0.9");
    o.require(err < 2e-2, "q within 2e-2");
    o.require(reported, "non-convergence raises an error");
}

// 9
void end_to_end(Outcome& o) {
    const auto r16 = roundtrip("sin(2*pi*x)", 16, "sine16");
    const auto r32 = roundtrip("sin(2*pi*x)", 32, "sine32");
    const double m16 = r16.metric("error_max"), s16 = r16.metric("error_rms");
    const double m32 = r32.metric("error_max"), s32 = r32.metric("error_rms");
    o.note << "J=16 max " << sci(m16) << " rms " << sci(s16) << "; J=32 max " << sci(m32) << " rms " << sci(s32);
    o.require(m16 < 0.1, "max error < 0.1");
    o.require(s16 < 0.05, "rms error < 0.05");
    o.require(m32 < m16 && s32 < s16, "error decreases from J=16 to J=32");
}

// 10
void mean_identity(Outcome& o) {
    const auto s = kernel_suite();
    o.note << "max |2K(1,1) - int q| " << sci(s.mean);
    o.require(s.mean < 1e-2, "within 1e-2");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget;  // seconds
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria{
        {"free-case exactness", 5, free_case},
        {"shift symmetry", 30, shift_symmetry},
        {"interlacing suite", 0, interlacing},
        {"far-flux ratio identity", 120, ratio_identity},
        {"near-flux identity", 120, near_flux},
        {"non-uniqueness demonstration", 10, nonuniqueness},
        {"kernel boundary recovery", 0, kernel_boundary},
        {"Volterra convergence", 0, volterra},
        {"end-to-end round trip", 120, end_to_end},
        {"mean identity", 0, mean_identity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.note << " [error: " << e.what() << "]";
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (criteria[i].budget > 0 && dt > criteria[i].budget) {
            o.pass = false;
            o.note << " [over time budget " << criteria[i].budget << " s]";
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    o.note.str().c_str(), dt);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}

#include "heatinv/sturm_liouville.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "heatinv/error.hpp"
#include "heatinv/free_basis.hpp"

namespace heatinv {
namespace {

constexpr double kPi = std::numbers::pi;

struct State {
    double phi;
    double dphi;
    double norm;
};

// phi'' = (q - nu) phi, plus the running integral of phi^2
inline State rhs(const State& s, double q, double nu) {
    return {s.dphi, (q - nu) * s.phi, s.phi * s.phi};
}

inline State axpy(const State& s, double h, const State& k) {
    return {s.phi + h * k.phi, s.dphi + h * k.dphi, s.norm + h * k.norm};
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Bisection down to a fraction of the bracket, then bracketed secant steps.
double refine_root(const std::function<double(double)>& f, double lo, double hi, double flo,
                   double fhi, double tol) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    const double initial = hi - lo;
    for (int i = 0; i < 200 && hi - lo > 1e-3 * initial; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    double x0 = lo, f0 = flo, x1 = hi, f1 = fhi;
    for (int it = 0; it < 200; ++it) {
        const double tol_eff = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x1));
        double x2 = (f1 != f0) ? x1 - f1 * (x1 - x0) / (f1 - f0) : 0.5 * (lo + hi);
        if (!(x2 > lo && x2 < hi)) x2 = 0.5 * (lo + hi);
        const double f2 = f(x2);
        if (f2 == 0.0) return x2;
        if ((f2 < 0.0) == (flo < 0.0)) {
            lo = x2;
            flo = f2;
        } else {
            hi = x2;
            fhi = f2;
        }
        if (std::abs(x2 - x1) <= tol_eff || hi - lo <= tol_eff) return x2;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    return 0.5 * (lo + hi);
}

enum class Family { Dirichlet, DirichletNeumann };

double find_eigenvalue(const Potential& q, std::size_t j, Family family, const SpectraOptions& opts) {
    const double shift = opts.seed_free ? 0.0 : q.integral();
    const auto jd = static_cast<double>(j);
    double lo, hi;
    if (family == Family::Dirichlet) {
        lo = std::pow((jd - 0.5) * kPi, 2) + shift;
        hi = std::pow((jd + 0.5) * kPi, 2) + shift;
    } else {
        lo = std::pow((jd - 1.0) * kPi, 2) + shift;
        hi = std::pow(jd * kPi, 2) + shift;
    }
    auto f = [&](double nu) {
        const PhiEvaluation e = solve_phi(q, nu, opts.phi);
        return family == Family::Dirichlet ? e.phi_end : e.dphi_end;
    };
    double flo = f(lo);
    double fhi = f(hi);
    int tries = 0;
    while ((flo < 0.0) == (fhi < 0.0) && flo != 0.0 && fhi != 0.0) {
        if (tries++ >= opts.max_expansions) {
            throw Error(ErrorKind::RootBracketing,
                        std::string(family == Family::Dirichlet ? "Dirichlet" : "Dirichlet-Neumann") +
                            " eigenvalue j=" + std::to_string(j) + " not bracketed in [" +
                            fmt_double(lo) + ", " + fmt_double(hi) + "]",
                        {jd, lo, hi});
        }
        const double grow = 0.5 * opts.expand_fraction * (hi - lo);
        lo -= grow;
        hi += grow;
        flo = f(lo);
        fhi = f(hi);
    }
    return refine_root(f, lo, hi, flo, fhi, opts.root_tol);
}

// Characteristic march: u(xi, eta) = K((xi+eta)/2, (xi-eta)/2) on a square
// grid with the x-step h; u(xi, 0) = 1/2 int_0^{xi/2} q, u(xi, xi) = 0,
// u_{xi eta} = q/4 u.
KernelField march_goursat(const Potential& q, std::size_t n_nodes, double h) {
    const std::size_t N = 2 * (n_nodes - 1);
    const std::size_t W = N + 1;
    std::vector<double> u(W * W, 0.0);
    auto U = [&](std::size_t a, std::size_t b) -> double& { return u[a * W + b]; };

    double acc = 0.0;
    double q_prev = q.at(0.0);
    for (std::size_t a = 1; a <= N; ++a) {
        const double q_cur = q.at(0.5 * static_cast<double>(a) * h);
        acc += 0.25 * h * (q_prev + q_cur);  // trapezoid on half steps in x
        q_prev = q_cur;
        U(a, 0) = 0.5 * acc;
    }
    for (std::size_t b = 0; b < N; ++b) {
        for (std::size_t a = b + 1; a + b + 2 <= N; ++a) {
            const double qc = q.at(0.5 * static_cast<double>(a + b + 1) * h);
            const double s = h * h * qc / 16.0;
            const double u00 = U(a, b), u10 = U(a + 1, b), u01 = U(a, b + 1);
            U(a + 1, b + 1) = (u10 + u01 - u00 + s * (u00 + u10 + u01)) / (1.0 - s);
        }
    }
    KernelField K(n_nodes, h);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        for (std::size_t j = 0; j <= i; ++j) K.ref(i, j) = U(i + j, i - j);
    }
    return K;
}

}  // namespace

PhiEvaluation solve_phi(const Potential& q, double nu, const PhiOptions& opts) {
    if (!std::isfinite(nu)) throw Error(ErrorKind::InvalidArgument, "nu must be finite");
    const std::size_t n = q.size();
    const double h = q.step();
    const double rate = std::sqrt(std::abs(nu) + q.max_abs());
    const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(rate * h / opts.max_phase_step)));
    if (sub * (n - 1) > opts.max_total_steps) {
        throw Error(ErrorKind::IntegrationFailure,
                    "nu=" + fmt_double(nu) + " needs " + std::to_string(sub * (n - 1)) +
                        " RK4 steps, above the cap " + std::to_string(opts.max_total_steps));
    }
    const double dt = h / static_cast<double>(sub);

    PhiEvaluation out;
    out.nu = nu;
    if (opts.keep_profile) {
        out.profile.assign(n, 0.0);
        out.dprofile.assign(n, 0.0);
        out.dprofile[0] = 1.0;
    }
    State s{0.0, 1.0, 0.0};
    int nodes = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double q0 = q[i];
        const double dq = (q[i + 1] - q[i]) / static_cast<double>(sub);
        for (std::size_t k = 0; k < sub; ++k) {
            const double qa = q0 + dq * static_cast<double>(k);
            const double qm = qa + 0.5 * dq;
            const double qb = qa + dq;
            const State k1 = rhs(s, qa, nu);
            const State k2 = rhs(axpy(s, 0.5 * dt, k1), qm, nu);
            const State k3 = rhs(axpy(s, 0.5 * dt, k2), qm, nu);
            const State k4 = rhs(axpy(s, dt, k3), qb, nu);
            const double prev = s.phi;
            s.phi += dt / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
            s.dphi += dt / 6.0 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);
            s.norm += dt / 6.0 * (k1.norm + 2.0 * k2.norm + 2.0 * k3.norm + k4.norm);
            const bool last = (i + 2 == n) && (k + 1 == sub);
            if (!last && prev != 0.0 && (prev < 0.0) != (s.phi < 0.0)) ++nodes;
        }
        if (!std::isfinite(s.phi) || !std::isfinite(s.dphi) || !std::isfinite(s.norm)) {
            throw Error(ErrorKind::IntegrationFailure,
                        "phi(x, nu=" + fmt_double(nu) + ") blew up near x=" +
                            fmt_double(static_cast<double>(i + 1) * h),
                        {static_cast<double>(i + 1) * h});
        }
        if (opts.keep_profile) {
            out.profile[i + 1] = s.phi;
            out.dprofile[i + 1] = s.dphi;
        }
    }
    out.phi_end = s.phi;
    out.dphi_end = s.dphi;
    out.norm_sq = s.norm;
    out.node_count = nodes;
    return out;
}

SpectralPair compute_spectra(const Potential& q, std::size_t j_max, const SpectraOptions& opts) {
    if (j_max < 1) throw Error(ErrorKind::InvalidArgument, "j_max must be at least 1");
    if (!(opts.root_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "root tolerance must be positive");
    SpectralPair sp;
    sp.dirichlet.resize(j_max);
    sp.dirichlet_neumann.resize(j_max);
    for (std::size_t j = 1; j <= j_max; ++j) {
        sp.dirichlet[j - 1] = find_eigenvalue(q, j, Family::Dirichlet, opts);
        sp.dirichlet_neumann[j - 1] = find_eigenvalue(q, j, Family::DirichletNeumann, opts);
    }
    for (std::size_t j = 0; j < j_max; ++j) {
        const double mu = sp.dirichlet_neumann[j];
        const double lam = sp.dirichlet[j];
        const bool ok = mu < lam && (j + 1 == j_max || lam < sp.dirichlet_neumann[j + 1]);
        if (!ok) {
            throw Error(ErrorKind::InternalConsistency,
                        "interlacing mu_j < lambda_j < mu_{j+1} violated at j=" + std::to_string(j + 1),
                        {static_cast<double>(j + 1)});
        }
        for (double nu : {lam, mu}) {
            const int nodes = solve_phi(q, nu, opts.phi).node_count;
            if (nodes != static_cast<int>(j)) {
                throw Error(ErrorKind::InternalConsistency,
                            "eigenfunction at nu=" + fmt_double(nu) + " has " + std::to_string(nodes) +
                                " interior nodes, expected " + std::to_string(j),
                            {static_cast<double>(j + 1), nu});
            }
        }
    }
    return sp;
}

SpectralPair free_spectra(std::size_t j_max, double shift) {
    SpectralPair sp;
    for (std::size_t j = 1; j <= j_max; ++j) {
        const auto jd = static_cast<double>(j);
        sp.dirichlet.push_back(jd * jd * kPi * kPi + shift);
        sp.dirichlet_neumann.push_back((jd - 0.5) * (jd - 0.5) * kPi * kPi + shift);
    }
    return sp;
}

KernelField goursat_kernel(const Potential& q) { return march_goursat(q, q.size(), q.step()); }

KernelField goursat_kernel_extended(const Potential& q, std::size_t extra_nodes) {
    return march_goursat(q, q.size() + extra_nodes, q.step());
}

double check_transmutation(const Potential& q, double nu) {
    const KernelField K = goursat_kernel(q);
    const std::vector<double> row = K.last_row();
    const std::size_t n = row.size();
    const double h = q.step();
    std::vector<double> w(n, h);
    if ((n - 1) % 2 == 0) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = (i == 0 || i + 1 == n) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
        }
    } else {
        w.front() = w.back() = 0.5 * h;
    }
    double integral = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        integral += w[i] * row[i] * free_basis::phi0(nu, static_cast<double>(i) * h);
    }
    const double represented = free_basis::phi0(nu, 1.0) + integral;
    return std::abs(solve_phi(q, nu).phi_end - represented);
}

}  // namespace heatinv

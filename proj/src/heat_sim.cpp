#include "heatinv/heat_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "heatinv/error.hpp"

namespace heatinv {
namespace {

// Cubic Hermite from nodal values and slopes.
double hermite(const std::vector<double>& f, const std::vector<double>& df, double step, double x) {
    const std::size_t n = f.size();
    double s = x / step;
    auto i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(n - 2)));
    const double t = s - static_cast<double>(i);
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * f[i] + h10 * step * df[i] + h01 * f[i + 1] + h11 * step * df[i + 1];
}

double lerp_grid(const std::vector<double>& u, double step, double x) {
    const std::size_t n = u.size();
    double s = x / step;
    auto i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(n - 2)));
    const double t = s - static_cast<double>(i);
    return (1 - t) * u[i] + t * u[i + 1];
}

}  // namespace

double PulseSpec::value(double t) const noexcept {
    if (t < 0.0 || t > support) return 0.0;
    switch (shape) {
        case PulseShape::Polynomial:
            return amplitude * t * t * (support - t) * (support - t);
        case PulseShape::SineSquared: {
            const double s = std::sin(std::numbers::pi * t / support);
            return amplitude * s * s;
        }
        case PulseShape::Zero:
            return 0.0;
    }
    return 0.0;
}

PulseRecord simulate(const Potential& q, const PulseSpec& pulse, double t_end, std::size_t m_steps,
                     const SimulationOptions& opts) {
    if (!(pulse.support > 0.0)) throw Error(ErrorKind::InvalidArgument, "pulse support must be positive");
    if (!(t_end > pulse.support)) {
        throw Error(ErrorKind::InvalidArgument, "t_end must exceed the pulse support");
    }
    if (m_steps < 1) throw Error(ErrorKind::InvalidArgument, "m_steps must be positive");
    const std::size_t n = q.size();
    const double h = q.step();
    const double dt = t_end / static_cast<double>(m_steps);
    if (dt / (h * h) > opts.max_ratio) {
        throw Error(ErrorKind::InvalidArgument,
                    "dt/h^2 = " + std::to_string(dt / (h * h)) + " exceeds the bound " +
                        std::to_string(opts.max_ratio) + "; increase m_steps",
                    {dt / (h * h)});
    }
    for (double xp : opts.probes) {
        if (!(xp >= 0.0 && xp <= 1.0)) throw Error(ErrorKind::InvalidArgument, "probe outside [0,1]");
    }

    PulseRecord rec;
    rec.support = pulse.support;
    rec.probe_x = opts.probes;
    rec.probe_u.assign(opts.probes.size(), std::vector<double>(m_steps + 1, 0.0));
    rec.t.resize(m_steps + 1);
    rec.a.resize(m_steps + 1);
    rec.b.assign(m_steps + 1, 0.0);
    rec.b0.assign(m_steps + 1, 0.0);

    std::vector<double> u(n, 0.0);
    const std::size_t m = n - 2;  // interior unknowns
    const double r = dt / (h * h);
    std::vector<double> diag(m), rhs(m), cp(m), dp(m);
    for (std::size_t k = 0; k < m; ++k) diag[k] = 1.0 + r + 0.5 * dt * q[k + 1];
    const double off = -0.5 * r;

    // Forward elimination coefficients do not change between steps.
    for (std::size_t k = 0; k < m; ++k) {
        const double denom = diag[k] - (k > 0 ? off * cp[k - 1] : 0.0);
        if (denom == 0.0 || !std::isfinite(denom)) {
            throw Error(ErrorKind::Simulation, "singular tridiagonal system at row " + std::to_string(k + 1),
                        {static_cast<double>(k + 1)});
        }
        cp[k] = off / denom;
        dp[k] = denom;
    }

    auto record = [&](std::size_t step) {
        rec.b[step] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
        rec.b0[step] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        for (std::size_t p = 0; p < opts.probes.size(); ++p) rec.probe_u[p][step] = lerp_grid(u, h, opts.probes[p]);
    };

    rec.t[0] = 0.0;
    rec.a[0] = pulse.value(0.0);
    u[n - 1] = rec.a[0];
    record(0);
    for (std::size_t s = 1; s <= m_steps; ++s) {
        const double t_new = t_end * static_cast<double>(s) / static_cast<double>(m_steps);
        const double a_new = pulse.value(t_new);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            const double lap = u[i - 1] - 2.0 * u[i] + u[i + 1];
            rhs[k] = u[i] + 0.5 * r * lap - 0.5 * dt * q[i] * u[i];
        }
        rhs[m - 1] += 0.5 * r * a_new;
        // Thomas sweep with the stored factors
        rhs[0] /= dp[0];
        for (std::size_t k = 1; k < m; ++k) rhs[k] = (rhs[k] - off * rhs[k - 1]) / dp[k];
        for (std::size_t k = m - 1; k-- > 0;) rhs[k] -= cp[k] * rhs[k + 1];
        for (std::size_t k = 0; k < m; ++k) u[k + 1] = rhs[k];
        u[n - 1] = a_new;
        if (!std::isfinite(u[n / 2])) {
            throw Error(ErrorKind::Simulation, "non-finite solution at t=" + std::to_string(t_new), {t_new});
        }
        rec.t[s] = t_new;
        rec.a[s] = a_new;
        record(s);
    }

    const auto mid = static_cast<std::size_t>(
        std::ceil(0.5 * (pulse.support + t_end) / dt));
    if (mid < m_steps) {
        const double bm = std::abs(rec.b[mid]);
        const double be = std::abs(rec.b[m_steps]);
        rec.growth_detected = be > 0.0 && be > 1.01 * bm;
    }
    return rec;
}

double default_t_end(double support, const std::vector<double>& lambdas) {
    double lam_min = 0.0;
    for (double l : lambdas) {
        if (l > 0.0 && (lam_min == 0.0 || l < lam_min)) lam_min = l;
    }
    const double by_tail = lam_min > 0.0 ? 3.0 / lam_min : 0.0;
    return std::max(5.0 * support, by_tail);
}

LaplaceSample laplace_transform(const PulseRecord& record, double lambda, double tail_tol) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::InvalidArgument, "Laplace parameter must be finite and non-negative");
    }
    const std::size_t m = record.t.size();
    if (m < 2) throw Error(ErrorKind::InvalidArgument, "record too short");
    LaplaceSample s;
    s.lambda = lambda;
    s.probe_values.assign(record.probe_x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double dt = record.t[i + 1] - record.t[i];
        const double w0 = 0.5 * dt * std::exp(-lambda * record.t[i]);
        const double w1 = 0.5 * dt * std::exp(-lambda * record.t[i + 1]);
        s.A += w0 * record.a[i] + w1 * record.a[i + 1];
        s.B += w0 * record.b[i] + w1 * record.b[i + 1];
        s.B0 += w0 * record.b0[i] + w1 * record.b0[i + 1];
        for (std::size_t p = 0; p < record.probe_x.size(); ++p) {
            s.probe_values[p] += w0 * record.probe_u[p][i] + w1 * record.probe_u[p][i + 1];
        }
    }
    double bmax = 0.0;
    for (double v : record.b) bmax = std::max(bmax, std::abs(v));
    s.tail_estimate = std::exp(-lambda * record.t.back()) * bmax;
    s.truncation_warning = s.tail_estimate > tail_tol;
    return s;
}

DirichletModes dirichlet_modes(const Potential& q, const std::vector<double>& eigenvalues,
                               const PhiOptions& opts) {
    DirichletModes modes;
    modes.step = q.step();
    PhiOptions po = opts;
    po.keep_profile = true;
    for (double lam : eigenvalues) {
        const PhiEvaluation e = solve_phi(q, lam, po);
        const double norm = std::sqrt(e.norm_sq);
        if (!(norm > 0.0)) throw Error(ErrorKind::InternalConsistency, "zero eigenfunction norm");
        std::vector<double> psi(e.profile), dpsi(e.dprofile);
        for (double& v : psi) v /= norm;
        for (double& v : dpsi) v /= norm;
        modes.eigenvalues.push_back(lam);
        modes.dpsi_end.push_back(e.dphi_end / norm);
        modes.psi.push_back(std::move(psi));
        modes.dpsi.push_back(std::move(dpsi));
    }
    return modes;
}

double modal_v(const Potential& q, const DirichletModes& modes, double A, double lambda, double x,
               const ModalOptions& opts) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::InvalidArgument, "x outside [0,1]");
    for (std::size_t j = 0; j < modes.eigenvalues.size(); ++j) {
        const double gap = std::abs(lambda + modes.eigenvalues[j]);
        if (gap < opts.pole_tol * std::max(1.0, std::abs(modes.eigenvalues[j]))) {
            throw Error(ErrorKind::NearPole,
                        "lambda=" + std::to_string(lambda) + " is within tolerance of the pole -lambda_" +
                            std::to_string(j + 1),
                        {static_cast<double>(j + 1), gap});
        }
    }
    if (A == 0.0) return 0.0;

    if (!opts.accelerate || modes.eigenvalues.empty()) {
        double v = 0.0;
        for (std::size_t j = 0; j < modes.eigenvalues.size(); ++j) {
            const double psi_x = hermite(modes.psi[j], modes.dpsi[j], modes.step, x);
            v -= modes.dpsi_end[j] * psi_x / (lambda + modes.eigenvalues[j]);
        }
        return A * v;
    }

    const double lam_ref = std::max(0.0, 1.0 - modes.eigenvalues.front());
    PhiOptions po;
    po.keep_profile = true;
    const PhiEvaluation ref = solve_phi(q, -lam_ref, po);
    const double base = hermite(ref.profile, ref.dprofile, q.step(), x) / ref.phi_end;
    double corr = 0.0;
    for (std::size_t j = 0; j < modes.eigenvalues.size(); ++j) {
        const double lj = modes.eigenvalues[j];
        const double psi_x = hermite(modes.psi[j], modes.dpsi[j], modes.step, x);
        corr += modes.dpsi_end[j] * psi_x / ((lambda + lj) * (lam_ref + lj));
    }
    return A * (base + (lambda - lam_ref) * corr);
}

}  // namespace heatinv

#include "heatinv/spectral_extract.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "heatinv/error.hpp"

namespace heatinv {
namespace {

constexpr double kPi = std::numbers::pi;

// Exact integral of exp(nu t) * (linear interpolant) over one cell of width dt:
// exp(nu t0) * dt * (w0 f0 + w1 f1).
void exp_weights(double s, double& w0, double& w1) {
    if (std::abs(s) < 1e-2) {
        w0 = 0.5 + s / 6.0 + s * s / 24.0 + s * s * s / 120.0 + s * s * s * s / 720.0;
        w1 = 0.5 + s / 3.0 + s * s / 8.0 + s * s * s / 30.0 + s * s * s * s / 144.0;
        return;
    }
    const double es = std::exp(s);
    w0 = (es - 1.0 - s) / (s * s);
    w1 = (s * es - es + 1.0) / (s * s);
}

double exp_integral(const std::vector<double>& t, const std::vector<double>& f, std::size_t end, double nu) {
    double acc = 0.0;
    for (std::size_t i = 0; i < end; ++i) {
        const double dt = t[i + 1] - t[i];
        double w0, w1;
        exp_weights(nu * dt, w0, w1);
        acc += std::exp(nu * t[i]) * dt * (w0 * f[i] + w1 * f[i + 1]);
    }
    return acc;
}

struct Event {
    double nu;
    bool pole;
};

std::vector<Event> scan(const RatioTrace& trace, std::size_t want_poles, std::size_t want_zeros,
                        const ExtractOptions& opts) {
    std::vector<Event> events;
    std::size_t poles = 0, zeros = 0;
    double nu = trace.nu_lo;
    double r = trace(nu);
    while (poles < want_poles || zeros < want_zeros) {
        if (nu >= trace.nu_hi) {
            throw Error(ErrorKind::Range,
                        "trace range ends at nu=" + std::to_string(trace.nu_hi) + " after " +
                            std::to_string(poles) + " poles and " + std::to_string(zeros) + " zeros",
                        {trace.nu_hi, static_cast<double>(poles), static_cast<double>(zeros)});
        }
        const double step = opts.scan_fraction * kPi * std::max(std::sqrt(std::abs(nu)), 1.0);
        const double nu_next = std::min(nu + step, trace.nu_hi);
        const double r_next = trace(nu_next);
        if (!std::isfinite(r_next)) {
            throw Error(ErrorKind::ExtractionConsistency, "non-finite ratio at nu=" + std::to_string(nu_next),
                        {nu_next});
        }
        if ((r < 0.0) != (r_next < 0.0)) {
            double lo = nu, hi = nu_next, r_lo = r, r_hi = r_next;
            while (hi - lo > std::max(opts.root_tol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi))) {
                const double mid = 0.5 * (lo + hi);
                const double rm = trace(mid);
                if (rm == 0.0) {
                    lo = hi = mid;
                    r_lo = r_hi = 0.0;
                    break;
                }
                if ((rm < 0.0) == (r_lo < 0.0)) {
                    lo = mid;
                    r_lo = rm;
                } else {
                    hi = mid;
                    r_hi = rm;
                }
            }
            const double small = std::min(std::abs(r_lo), std::abs(r_hi));
            const double large = std::max(std::abs(r_lo), std::abs(r_hi));
            const double where = 0.5 * (lo + hi);
            if (small > opts.pole_threshold) {
                events.push_back({where, true});
                ++poles;
            } else if (large < opts.zero_threshold) {
                events.push_back({where, false});
                ++zeros;
            } else {
                throw Error(ErrorKind::ExtractionConsistency,
                            "sign change near nu=" + std::to_string(where) +
                                " is neither a pole nor a zero (|r| in [" + std::to_string(small) + ", " +
                                std::to_string(large) + "])",
                            {where});
            }
        }
        nu = nu_next;
        r = r_next;
    }
    return events;
}

}  // namespace

double negative_floor(double max_abs_q) { return std::max(10.0, 2.0 * max_abs_q); }

RatioTrace synthetic_trace(const Potential& q, RatioKind kind, double nu_hi, const PhiOptions& opts) {
    RatioTrace tr;
    tr.kind = kind;
    tr.nu_lo = -negative_floor(q.max_abs());
    tr.nu_hi = nu_hi;
    tr.evaluator = [q, kind, opts](double nu) {
        const PhiEvaluation e = solve_phi(q, nu, opts);
        return kind == RatioKind::FluxFar ? e.dphi_end / e.phi_end : 1.0 / e.phi_end;
    };
    return tr;
}

RatioTrace measured_trace(const PulseRecord& record, RatioKind kind, std::size_t j_max,
                          const MeasuredOptions& opts) {
    const std::size_t total = record.t.size();
    if (total < 3) throw Error(ErrorKind::InvalidArgument, "record too short");
    const double dt = record.t[1] - record.t[0];
    const std::vector<double>& flux = kind == RatioKind::FluxFar ? record.b : record.b0;

    const std::size_t modes = j_max + opts.extra_modes;
    const double rho_max = std::pow(static_cast<double>(modes) * kPi, 2);
    const double rho_next = std::pow((static_cast<double>(modes) + 1.0) * kPi, 2);
    auto decim = static_cast<std::size_t>(std::max(1.0, std::round(opts.rate_step / (rho_max * dt))));
    if (decim % 2 == 0) ++decim;
    const double t_fit = record.support + opts.fast_decay / rho_next;
    auto start = static_cast<std::size_t>(std::ceil(t_fit / dt - 1e-9));
    if (start + 1 >= total) {
        throw Error(ErrorKind::Range, "record ends before the fit window", {record.t.back(), t_fit});
    }
    const std::size_t wanted = opts.samples_per_mode * modes;
    if ((total - 2 - start) / decim + 1 < 2 * modes + 2) {
        throw Error(ErrorKind::Range,
                    "record ends before enough post-pulse samples for " + std::to_string(modes) + " modes",
                    {record.t.back(), t_fit});
    }
    const std::size_t available = (total - 2 - start) / decim + 1;
    const std::size_t N = std::min(available, wanted);

    Eigen::VectorXd y(static_cast<Eigen::Index>(N));
    // [1,2,1]/4 keeps exponential sums exact and damps the z ~ -1 ringing of stiff Crank-Nicolson modes
    for (std::size_t k = 0; k < N; ++k) {
        const std::size_t s = start + k * decim;
        y(static_cast<Eigen::Index>(k)) = 0.25 * (flux[s - 1] + 2.0 * flux[s] + flux[s + 1]);
    }
    const double ymax = y.cwiseAbs().maxCoeff();
    if (!(ymax > 0.0)) throw Error(ErrorKind::ExtractionConsistency, "post-pulse flux is identically zero");

    const Eigen::Index L = static_cast<Eigen::Index>(N / 2);
    const Eigen::Index rows = static_cast<Eigen::Index>(N) - L;
    Eigen::MatrixXd H(rows, L + 1);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j <= L; ++j) H(i, j) = y(i + j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinV);
    const Eigen::Index M = std::min<Eigen::Index>(static_cast<Eigen::Index>(modes), L);
    const Eigen::MatrixXd V = svd.matrixV().leftCols(M);
    const Eigen::MatrixXd X = V.topRows(L).completeOrthogonalDecomposition().solve(V.bottomRows(L));
    Eigen::EigenSolver<Eigen::MatrixXd> es(X, false);

    std::vector<double> z;
    for (Eigen::Index l = 0; l < M; ++l) {
        const std::complex<double> zl = es.eigenvalues()(l);
        if (std::abs(zl.imag()) <= 1e-8 * std::abs(zl) && zl.real() > 0.0) z.push_back(zl.real());
    }
    if (z.empty()) throw Error(ErrorKind::ExtractionConsistency, "exponential fit found no real decay rates");
    std::sort(z.begin(), z.end(), std::greater<>());

    // amplitudes at t_fit by least squares over the fitted samples
    const auto P = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXd Vz(static_cast<Eigen::Index>(N), P);
    for (Eigen::Index l = 0; l < P; ++l) {
        double p = 1.0;
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(N); ++k) {
            Vz(k, l) = p;
            p *= z[static_cast<std::size_t>(l)];
        }
    }
    const Eigen::VectorXd beta = Vz.colPivHouseholderQr().solve(y);
    const double resid = (Vz * beta - y).norm() / std::sqrt(static_cast<double>(N)) / ymax;

    std::vector<double> rates(z.size()), amps(z.size());
    for (std::size_t l = 0; l < z.size(); ++l) {
        // per-step amplification of the Crank-Nicolson scheme inverted exactly
        const double zs = std::pow(z[l], 1.0 / static_cast<double>(decim));
        rates[l] = 2.0 / dt * (1.0 - zs) / (1.0 + zs);
        amps[l] = beta(static_cast<Eigen::Index>(l)) * 4.0 * zs / ((1.0 + zs) * (1.0 + zs));
    }

    const double t_c = record.t[start];
    std::vector<double> tt(record.t.begin(), record.t.begin() + static_cast<std::ptrdiff_t>(start) + 1);
    std::vector<double> ff(flux.begin(), flux.begin() + static_cast<std::ptrdiff_t>(start) + 1);
    std::vector<double> aa(record.a.begin(), record.a.begin() + static_cast<std::ptrdiff_t>(start) + 1);

    RatioTrace tr;
    tr.kind = kind;
    tr.fitted_rates = rates;
    tr.fit_residual = resid;
    tr.nu_lo = -opts.nu_floor;
    std::vector<double> sorted(rates);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    tr.nu_hi = m >= 2 ? 0.5 * (sorted[m - 2] + sorted[m - 1]) : sorted.back();
    tr.evaluator = [tt, ff, aa, rates, amps, t_c](double nu) {
        const std::size_t cells = tt.size() - 1;
        double B = exp_integral(tt, ff, cells, nu);
        double tail = 0.0;
        for (std::size_t l = 0; l < rates.size(); ++l) tail += amps[l] / (rates[l] - nu);
        B += std::exp(nu * t_c) * tail;
        const double A = exp_integral(tt, aa, cells, nu);
        return B / A;
    };
    return tr;
}

SpectralPair extract_two_spectra(const RatioTrace& trace, std::size_t j_max, const ExtractOptions& opts) {
    if (trace.kind != RatioKind::FluxFar) {
        throw Error(ErrorKind::InvalidArgument, "two-spectra extraction needs a far-end flux trace");
    }
    const std::vector<Event> events = scan(trace, j_max, j_max, opts);
    SpectralPair sp;
    for (const Event& e : events) {
        if (e.pole && sp.dirichlet.size() < j_max) sp.dirichlet.push_back(e.nu);
        if (!e.pole && sp.dirichlet_neumann.size() < j_max) sp.dirichlet_neumann.push_back(e.nu);
    }
    std::vector<double> bad;
    for (std::size_t j = 0; j < j_max; ++j) {
        const bool ok = sp.dirichlet_neumann[j] < sp.dirichlet[j] &&
                        (j + 1 == j_max || sp.dirichlet[j] < sp.dirichlet_neumann[j + 1]);
        if (!ok) bad.push_back(static_cast<double>(j + 1));
    }
    if (!bad.empty()) {
        std::string list;
        for (double b : bad) list += (list.empty() ? "" : ",") + std::to_string(static_cast<int>(b));
        throw Error(ErrorKind::ExtractionConsistency, "interlacing violated at j = " + list, bad);
    }
    return sp;
}

std::vector<double> extract_dirichlet_only(const RatioTrace& trace, std::size_t j_max, const ExtractOptions& opts) {
    const std::vector<Event> events = scan(trace, j_max, 0, opts);
    std::vector<double> lam;
    for (const Event& e : events) {
        if (!e.pole && trace.kind == RatioKind::FluxNear) {
            throw Error(ErrorKind::ExtractionConsistency,
                        "near-end ratio has a zero at nu=" + std::to_string(e.nu), {e.nu});
        }
        if (e.pole) lam.push_back(e.nu);
    }
    return lam;
}

}  // namespace heatinv

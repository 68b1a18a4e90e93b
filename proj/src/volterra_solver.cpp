#include "heatinv/volterra_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heatinv/error.hpp"

namespace heatinv {
namespace {

// Boundary trace on t = m h, m in [-N, N].
struct Extended {
    const std::vector<double>& v;
    std::ptrdiff_t N;
    bool odd;

    double operator()(std::ptrdiff_t m) const {
        if (m < -N || m > N) {
            throw Error(ErrorKind::Domain, "boundary argument index " + std::to_string(m) + " outside [-1,1]",
                        {static_cast<double>(m) / static_cast<double>(N)});
        }
        if (m >= 0) return v[static_cast<std::size_t>(m)];
        return odd ? -v[static_cast<std::size_t>(-m)] : v[static_cast<std::size_t>(-m)];
    }
};

double sup_diff(const IterationState& a, const IterationState& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.q.size(); ++i) d = std::max(d, std::abs(a.q[i] - b.q[i]));
    return std::max(d, a.k.max_diff(b.k));
}

IterationState add_source(IterationState w, const SourceTerm& s) {
    for (std::size_t i = 0; i < w.q.size(); ++i) w.q[i] += s.f[i];
    auto& raw = w.k.raw();
    const auto& g = s.g.raw();
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += g[i];
    return w;
}

bool finite(const IterationState& s) {
    for (double v : s.q)
        if (!std::isfinite(v)) return false;
    for (double v : s.k.raw())
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

SourceTerm build_source(const BoundaryKernel& bk) {
    const std::size_t n = bk.n_nodes;
    if (n < 3 || bk.K1.size() != n || bk.K1x.size() != n || bk.K1y.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "boundary kernel arrays do not match n_nodes");
    }
    const auto N = static_cast<std::ptrdiff_t>(n - 1);
    const double h = 1.0 / static_cast<double>(N);
    const Extended K1{bk.K1, N, true};
    const Extended K1x{bk.K1x, N, true};
    const Extended K1y{bk.K1y, N, false};

    // C[m + N] = int_{-1}^{t_m} Kx(1,t) dt
    std::vector<double> C(2 * n - 1, 0.0);
    for (std::ptrdiff_t m = -N + 1; m <= N; ++m) {
        C[static_cast<std::size_t>(m + N)] = C[static_cast<std::size_t>(m + N - 1)] + 0.5 * h * (K1x(m - 1) + K1x(m));
    }

    SourceTerm s;
    s.f.resize(n);
    s.g = KernelField(n);
    for (std::ptrdiff_t i = 0; i <= N; ++i) {
        s.f[static_cast<std::size_t>(i)] = 2.0 * (K1y(2 * i - N) + K1x(2 * i - N));
        for (std::ptrdiff_t j = 0; j <= i; ++j) {
            const std::ptrdiff_t lo = i + j - N;
            const std::ptrdiff_t hi = j - i + N;
            const double integral = C[static_cast<std::size_t>(hi + N)] - C[static_cast<std::size_t>(lo + N)];
            s.g.ref(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                0.5 * (K1(lo) + K1(hi)) - 0.5 * integral;
        }
    }
    return s;
}

IterationState apply_W(const IterationState& state) {
    const std::size_t n = state.q.size();
    if (state.k.size() != n) throw Error(ErrorKind::InvalidArgument, "state components differ in size");
    const auto N = static_cast<std::ptrdiff_t>(n - 1);
    const double h = 1.0 / static_cast<double>(N);
    const KernelField& K = state.k;
    const std::vector<double>& q = state.q;

    // P[k][m + k] = sum_{t=-k}^{m} K(k, t)
    std::vector<std::vector<double>> P(n);
    for (std::ptrdiff_t k = 0; k <= N; ++k) {
        auto& row = P[static_cast<std::size_t>(k)];
        row.resize(static_cast<std::size_t>(2 * k + 1));
        double acc = 0.0;
        for (std::ptrdiff_t m = -k; m <= k; ++m) {
            acc += K.at(static_cast<std::size_t>(k), m);
            row[static_cast<std::size_t>(m + k)] = acc;
        }
    }
    auto trap_row = [&](std::ptrdiff_t k, std::ptrdiff_t lo, std::ptrdiff_t hi) {
        if (hi <= lo) return 0.0;
        const auto& row = P[static_cast<std::size_t>(k)];
        const double sum = row[static_cast<std::size_t>(hi + k)] - (lo > -k ? row[static_cast<std::size_t>(lo - 1 + k)] : 0.0);
        const auto kk = static_cast<std::size_t>(k);
        return h * (sum - 0.5 * (K.at(kk, lo) + K.at(kk, hi)));
    };

    IterationState out;
    out.q.assign(n, 0.0);
    out.k = KernelField(n);
    for (std::ptrdiff_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (std::ptrdiff_t k = i; k <= N; ++k) {
            const double w = (k == i || k == N) ? 0.5 * h : h;
            s += w * q[static_cast<std::size_t>(k)] * K.at(static_cast<std::size_t>(k), 2 * i - k);
        }
        out.q[static_cast<std::size_t>(i)] = -2.0 * s;
        for (std::ptrdiff_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            // the k = i term has a zero-length inner interval
            for (std::ptrdiff_t k = i + 1; k <= N; ++k) {
                const double w = (k == N) ? 0.5 * h : h;
                acc += w * q[static_cast<std::size_t>(k)] * trap_row(k, j - (k - i), j + (k - i));
            }
            out.k.ref(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 0.5 * acc;
        }
    }
    return out;
}

FixedPointResult solve_fixed_point(const SourceTerm& source, const FixedPointOptions& opts) {
    if (!(opts.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "iteration tolerance must be positive");
    if (opts.max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be positive");
    const std::size_t n = source.f.size();
    if (source.g.size() != n) throw Error(ErrorKind::InvalidArgument, "source components differ in size");

    FixedPointResult res;
    IterationState U{source.f, source.g};
    int growing = 0;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        IterationState next = add_source(apply_W(U), source);
        const double d = finite(next) ? sup_diff(next, U) : std::numeric_limits<double>::infinity();
        res.norms.push_back(d);
        U = std::move(next);
        res.iterations = it;
        if (!std::isfinite(d)) {
            throw Error(ErrorKind::Divergence, "fixed-point iterate became non-finite at iteration " + std::to_string(it),
                        res.norms);
        }
        if (it >= 2 && d > res.norms[it - 2] && d > 10.0 * res.norms.front()) {
            if (++growing >= 3) {
                throw Error(ErrorKind::Divergence,
                            "update norm grew for 3 iterations beyond 10x the first (" + std::to_string(d) + ")",
                            res.norms);
            }
        } else {
            growing = 0;
        }
        if (d < opts.tol) break;
        if (it == opts.max_iter) {
            throw Error(ErrorKind::NonConvergence,
                        "no convergence in " + std::to_string(opts.max_iter) + " iterations (last update " +
                            std::to_string(d) + ")",
                        res.norms);
        }
    }
    for (std::size_t k = opts.burn_in + 1; k < res.norms.size(); ++k) {
        if (res.norms[k - 1] > 0.0) res.contraction = std::max(res.contraction, res.norms[k] / res.norms[k - 1]);
    }
    res.fixed_point_residual = sup_diff(U, add_source(apply_W(U), source));
    res.state = std::move(U);
    return res;
}

ExtractedPotential extract_potential(const IterationState& state) {
    const std::size_t n = state.q.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    const std::vector<double> D = state.k.diagonal();
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dD;
        if (i + 2 < n) {
            dD = (-3.0 * D[i] + 4.0 * D[i + 1] - D[i + 2]) / (2.0 * h);
        } else {
            dD = (3.0 * D[i] - 4.0 * D[i - 1] + D[i - 2]) / (2.0 * h);
        }
        resid = std::max(resid, std::abs(state.q[i] - 2.0 * dD));
    }
    return {Potential(state.q), resid};
}

}  // namespace heatinv

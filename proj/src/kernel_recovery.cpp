#include "heatinv/kernel_recovery.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "heatinv/error.hpp"
#include "heatinv/free_basis.hpp"
#include "heatinv/sturm_liouville.hpp"

namespace heatinv {
namespace {

constexpr double kPi = std::numbers::pi;

void check_input(const std::vector<double>& nus, const char* what) {
    if (nus.empty()) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": empty spectrum");
    for (std::size_t i = 0; i < nus.size(); ++i) {
        if (!std::isfinite(nus[i])) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": non-finite value");
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(nus[i] - nus[j]) < 1e-8) {
                throw Error(ErrorKind::InvalidArgument,
                            std::string(what) + ": eigenvalues " + std::to_string(j + 1) + " and " +
                                std::to_string(i + 1) + " coincide",
                            {static_cast<double>(j + 1), static_cast<double>(i + 1)});
            }
        }
    }
}

std::vector<double> extend(const std::vector<double>& nus, double offset, const AsymptoticFit& fit,
                           std::size_t factor) {
    std::vector<double> out(nus);
    const std::size_t J = nus.size();
    for (std::size_t j = J + 1; j <= factor * J; ++j) {
        const double w = static_cast<double>(j) - offset;
        out.push_back(w * w * kPi * kPi + fit.a + fit.b / (w * w));
    }
    return out;
}

struct Factored {
    GramSystem sys;
    Eigen::VectorXd scale;
    Eigen::LLT<Eigen::MatrixXd> llt;

    Eigen::VectorXd solve(const Eigen::VectorXd& v) const {
        return scale.cwiseProduct(llt.solve(scale.cwiseProduct(v)));
    }
};

Factored factor_gram(const std::vector<double>& nus, const RecoveryOptions& opts) {
    const auto n = static_cast<Eigen::Index>(nus.size());
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            G(i, j) = G(j, i) = free_basis::inner(nus[static_cast<std::size_t>(i)], nus[static_cast<std::size_t>(j)]);
        }
    }
    Factored f;
    f.sys.size = nus.size();
    f.sys.matrix.assign(G.data(), G.data() + G.size());
    f.scale = G.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd Gs = f.scale.asDiagonal() * G * f.scale.asDiagonal();
    Gs.diagonal().array() += opts.ridge;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Gs, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    f.sys.condition_estimate = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    f.sys.ill_conditioned = !(f.sys.condition_estimate <= opts.condition_ceiling);
    f.llt.compute(Gs);
    if (f.llt.info() != Eigen::Success) {
        throw Error(ErrorKind::Recovery, "Gram matrix is not positive definite",
                    {f.sys.condition_estimate});
    }
    return f;
}

void require_finite(const Eigen::VectorXd& v, const char* what) {
    if (!v.allFinite()) throw Error(ErrorKind::Recovery, std::string(what) + ": non-finite solution");
}

double projection(const BasisExpansion& e, double nu) {
    double s = e.linear_coeff * free_basis::moment_y(nu);
    for (std::size_t m = 0; m < e.nus.size(); ++m) s += e.coeffs[m] * free_basis::inner(e.nus[m], nu);
    return s;
}

}  // namespace

double BasisExpansion::value(double y) const {
    double s = linear_coeff * y;
    for (std::size_t j = 0; j < nus.size(); ++j) s += coeffs[j] * free_basis::phi0(nus[j], y);
    return s;
}

double BasisExpansion::derivative(double y) const {
    double s = linear_coeff;
    for (std::size_t j = 0; j < nus.size(); ++j) s += coeffs[j] * free_basis::dphi0(nus[j], y);
    return s;
}

AsymptoticFit fit_asymptotics(const std::vector<double>& nus, double offset, double fit_fraction) {
    const std::size_t J = nus.size();
    const auto first = static_cast<std::size_t>(std::floor(fit_fraction * static_cast<double>(J)));
    std::vector<double> w, d;
    for (std::size_t j = first + 1; j <= J; ++j) {
        const double wj = static_cast<double>(j) - offset;
        w.push_back(wj);
        d.push_back(nus[j - 1] - wj * wj * kPi * kPi);
    }
    AsymptoticFit fit;
    if (w.size() < 2) {
        fit.a = d.empty() ? 0.0 : d.back();
        return fit;
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(w.size()), 2);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
        A(static_cast<Eigen::Index>(i), 0) = 1.0;
        A(static_cast<Eigen::Index>(i), 1) = 1.0 / (w[i] * w[i]);
        rhs(static_cast<Eigen::Index>(i)) = d[i];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(rhs);
    fit.a = c(0);
    fit.b = c(1);
    return fit;
}

K1Recovery recover_K1(const std::vector<double>& dirichlet, const RecoveryOptions& opts) {
    check_input(dirichlet, "Dirichlet spectrum");
    if (opts.tail_factor < 1) throw Error(ErrorKind::InvalidArgument, "tail_factor must be at least 1");
    const AsymptoticFit fit = fit_asymptotics(dirichlet, 0.0, opts.fit_fraction);
    const std::vector<double> nus = extend(dirichlet, 0.0, fit, opts.tail_factor);

    Factored f = factor_gram(nus, opts);
    const auto n = static_cast<Eigen::Index>(nus.size());
    Eigen::VectorXd r(n), u(n), p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double nu = nus[static_cast<std::size_t>(i)];
        p(i) = free_basis::phi0(nu, 1.0);
        r(i) = -p(i);
        u(i) = free_basis::moment_y(nu);
    }
    f.sys.rhs.assign(r.data(), r.data() + n);

    K1Recovery out;
    out.mean_estimate = fit.a;
    double alpha = 0.0;
    Eigen::VectorXd c;
    if (opts.endpoint_constraint) {
        // G c + alpha u = r and alpha + p.c = a/2
        const Eigen::VectorXd Gr = f.solve(r);
        const Eigen::VectorXd Gu = f.solve(u);
        const double denom = 1.0 - p.dot(Gu);
        if (!(std::abs(denom) > 1e-14)) throw Error(ErrorKind::Recovery, "endpoint constraint is degenerate");
        alpha = (0.5 * fit.a - p.dot(Gr)) / denom;
        c = Gr - alpha * Gu;
    } else {
        c = f.solve(r);
    }
    require_finite(c, "K(1,y) expansion");
    if (!std::isfinite(alpha)) throw Error(ErrorKind::Recovery, "K(1,y) expansion: non-finite linear term");

    out.expansion.nus = nus;
    out.expansion.coeffs.assign(c.data(), c.data() + n);
    out.expansion.linear_coeff = alpha;
    out.gram = std::move(f.sys);
    out.k11 = out.expansion.value(1.0);
    for (double lam : dirichlet) out.residuals.push_back(projection(out.expansion, lam) + free_basis::phi0(lam, 1.0));
    return out;
}

K1xRecovery recover_K1x(const std::vector<double>& dirichlet_neumann, const K1Recovery& k1,
                        const RecoveryOptions& opts) {
    check_input(dirichlet_neumann, "Dirichlet-Neumann spectrum");
    const AsymptoticFit fit = fit_asymptotics(dirichlet_neumann, 0.5, opts.fit_fraction);
    const std::vector<double> nus = extend(dirichlet_neumann, 0.5, fit, opts.tail_factor);
    Factored f = factor_gram(nus, opts);
    const auto n = static_cast<Eigen::Index>(nus.size());
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double nu = nus[static_cast<std::size_t>(i)];
        r(i) = -free_basis::dphi0(nu, 1.0) - k1.k11 * free_basis::phi0(nu, 1.0);
    }
    f.sys.rhs.assign(r.data(), r.data() + n);
    const Eigen::VectorXd d = f.solve(r);
    require_finite(d, "Kx(1,y) expansion");

    K1xRecovery out;
    out.expansion.nus = nus;
    out.expansion.coeffs.assign(d.data(), d.data() + n);
    out.gram = std::move(f.sys);
    for (double mu : dirichlet_neumann) {
        out.residuals.push_back(projection(out.expansion, mu) + free_basis::dphi0(mu, 1.0) +
                                k1.k11 * free_basis::phi0(mu, 1.0));
    }
    return out;
}

BoundaryKernel sample_boundary(const K1Recovery& k1, const K1xRecovery& k1x, std::size_t n_nodes) {
    if (n_nodes < 3) throw Error(ErrorKind::InvalidArgument, "boundary grid needs at least 3 nodes");
    BoundaryKernel bk;
    bk.n_nodes = n_nodes;
    bk.K1.resize(n_nodes);
    bk.K1x.resize(n_nodes);
    bk.K1y.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double y = static_cast<double>(i) / static_cast<double>(n_nodes - 1);
        bk.K1[i] = k1.expansion.value(y);
        bk.K1y[i] = k1.expansion.derivative(y);
        bk.K1x[i] = k1x.expansion.value(y);
    }
    bk.coeffs_c = k1.expansion.coeffs;
    bk.coeffs_d = k1x.expansion.coeffs;
    return bk;
}

BoundaryKernel goursat_boundary(const Potential& q) {
    const std::size_t n = q.size();
    const double h = q.step();
    const KernelField K = goursat_kernel_extended(q, 2);
    BoundaryKernel bk;
    bk.n_nodes = n;
    bk.K1.resize(n);
    bk.K1x.resize(n);
    bk.K1y.resize(n);
    const std::size_t last = n - 1;
    for (std::size_t j = 0; j < n; ++j) bk.K1[j] = K.at(last, static_cast<std::ptrdiff_t>(j));
    for (std::size_t j = 0; j < last; ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        bk.K1x[j] = (K.at(last + 1, jj) - K.at(last - 1, jj)) / (2.0 * h);
    }
    {
        const auto jj = static_cast<std::ptrdiff_t>(last);
        bk.K1x[last] = (-3.0 * K.at(last, jj) + 4.0 * K.at(last + 1, jj) - K.at(last + 2, jj)) / (2.0 * h);
    }
    for (std::size_t j = 0; j < last; ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        bk.K1y[j] = (K.at(last, jj + 1) - K.at(last, jj - 1)) / (2.0 * h);
    }
    bk.K1y[last] = (3.0 * bk.K1[last] - 4.0 * bk.K1[last - 1] + bk.K1[last - 2]) / (2.0 * h);
    return bk;
}

}  // namespace heatinv

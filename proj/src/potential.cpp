#include "heatinv/potential.hpp"

#include <algorithm>
#include <cmath>

#include "heatinv/error.hpp"

namespace heatinv {

Potential::Potential(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 3) {
        throw Error(ErrorKind::InvalidArgument, "potential needs at least 3 nodes, got " +
                                                    std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorKind::InvalidArgument,
                        "potential sample " + std::to_string(i) + " is not finite");
        }
    }
}

Potential Potential::from_function(std::size_t n_nodes, const std::function<double(double)>& f) {
    if (n_nodes < 3) {
        throw Error(ErrorKind::InvalidArgument, "potential needs at least 3 nodes");
    }
    std::vector<double> v(n_nodes);
    const double h = 1.0 / static_cast<double>(n_nodes - 1);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        v[i] = f(static_cast<double>(i) * h);
    }
    return Potential(std::move(v));
}

Potential Potential::constant(std::size_t n_nodes, double c) {
    return Potential(std::vector<double>(n_nodes, c));
}

double Potential::at(double x) const noexcept {
    const std::size_t n = values_.size();
    const double s = x * static_cast<double>(n - 1);
    auto cell = static_cast<std::ptrdiff_t>(std::floor(s));
    cell = std::clamp<std::ptrdiff_t>(cell, 0, static_cast<std::ptrdiff_t>(n) - 2);
    const double w = s - static_cast<double>(cell);
    const auto c = static_cast<std::size_t>(cell);
    return (1.0 - w) * values_[c] + w * values_[c + 1];
}

double Potential::integral() const noexcept {
    double sum = 0.5 * (values_.front() + values_.back());
    for (std::size_t i = 1; i + 1 < values_.size(); ++i) sum += values_[i];
    return sum * step();
}

double Potential::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

Potential Potential::reflected() const {
    std::vector<double> r(values_.rbegin(), values_.rend());
    return Potential(std::move(r));
}

Potential Potential::shifted(double c) const {
    std::vector<double> r = values_;
    for (double& v : r) v += c;
    return Potential(std::move(r));
}

double Potential::asymmetry() const noexcept {
    double m = 0.0;
    const std::size_t n = values_.size();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(values_[i] - values_[n - 1 - i]));
    return m;
}

}  // namespace heatinv

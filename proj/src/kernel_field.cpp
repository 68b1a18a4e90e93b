#include "heatinv/kernel_field.hpp"

#include <algorithm>
#include <cmath>

#include "heatinv/error.hpp"

namespace heatinv {

KernelField::KernelField(std::size_t n_nodes, double step)
    : n_(n_nodes), data_(n_nodes * (n_nodes + 1) / 2, 0.0) {
    if (n_nodes < 2) throw Error(ErrorKind::InvalidArgument, "kernel field needs at least 2 nodes");
    step_ = step > 0.0 ? step : 1.0 / static_cast<double>(n_nodes - 1);
}

std::vector<double> KernelField::diagonal() const {
    std::vector<double> d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = data_[offset(i) + i];
    return d;
}

std::vector<double> KernelField::last_row() const {
    const auto first = data_.begin() + static_cast<std::ptrdiff_t>(offset(n_ - 1));
    return {first, first + static_cast<std::ptrdiff_t>(n_)};
}

double KernelField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double KernelField::max_diff(const KernelField& other) const {
    if (other.n_ != n_ || other.step_ != step_) throw Error(ErrorKind::InvalidArgument, "kernel fields on different grids");
    double m = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) m = std::max(m, std::abs(data_[k] - other.data_[k]));
    return m;
}

}  // namespace heatinv

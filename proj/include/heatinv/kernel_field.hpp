#pragma once

#include <cstddef>
#include <vector>

namespace heatinv {

/// Triangular array K(x_i, y_j), 0 <= y_j <= x_i <= 1, on the uniform grid
/// x_i = i / (n - 1). Reads with j < 0 follow the odd extension K(x, -y) = -K(x, y).
class KernelField {
public:
    KernelField() = default;
    /// step defaults to 1/(n_nodes - 1); the Goursat oracle uses longer grids.
    explicit KernelField(std::size_t n_nodes, double step = 0.0);

    std::size_t size() const noexcept { return n_; }
    double step() const noexcept { return step_; }

    double at(std::size_t i, std::ptrdiff_t j) const noexcept {
        return j >= 0 ? data_[offset(i) + static_cast<std::size_t>(j)]
                      : -data_[offset(i) + static_cast<std::size_t>(-j)];
    }
    double& ref(std::size_t i, std::size_t j) noexcept { return data_[offset(i) + j]; }

    /// K(x_i, x_i)
    std::vector<double> diagonal() const;
    /// K(1, y_j)
    std::vector<double> last_row() const;

    double max_abs() const noexcept;
    /// max |this - other| over the triangle
    double max_diff(const KernelField& other) const;

    const std::vector<double>& raw() const noexcept { return data_; }
    std::vector<double>& raw() noexcept { return data_; }

private:
    static std::size_t offset(std::size_t i) noexcept { return i * (i + 1) / 2; }

    std::size_t n_ = 0;
    double step_ = 0.0;
    std::vector<double> data_;
};

}  // namespace heatinv

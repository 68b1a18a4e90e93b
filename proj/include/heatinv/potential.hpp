#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace heatinv {

/// Samples q_i = q(i/(n-1)) of the potential on a uniform grid over [0,1].
/// Between nodes the potential is taken piecewise linear.
class Potential {
public:
    explicit Potential(std::vector<double> values);

    static Potential from_function(std::size_t n_nodes, const std::function<double(double)>& f);
    static Potential constant(std::size_t n_nodes, double c);

    std::size_t size() const noexcept { return values_.size(); }
    double step() const noexcept { return 1.0 / static_cast<double>(values_.size() - 1); }
    double node(std::size_t i) const noexcept { return static_cast<double>(i) * step(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    /// Linear interpolation; outside [0,1] the end segments are extended.
    double at(double x) const noexcept;

    /// Trapezoid integral over [0,1] (exact for the piecewise-linear model).
    double integral() const noexcept;
    double max_abs() const noexcept;

    /// q(1 - x) on the same grid.
    Potential reflected() const;
    Potential shifted(double c) const;

    /// max_i |q(x_i) - q(1 - x_i)|
    double asymmetry() const noexcept;

private:
    std::vector<double> values_;
};

}  // namespace heatinv

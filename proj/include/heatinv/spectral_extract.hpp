#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "heatinv/heat_sim.hpp"
#include "heatinv/potential.hpp"
#include "heatinv/sturm_liouville.hpp"

namespace heatinv {

/// FluxFar is B/A = phi'(1,nu)/phi(1,nu), FluxNear is B0/A = 1/phi(1,nu),
/// both as functions of nu = -lambda.
enum class RatioKind { FluxFar, FluxNear };

struct RatioTrace {
    RatioKind kind = RatioKind::FluxFar;
    std::function<double(double)> evaluator;
    double nu_lo = 0.0;
    double nu_hi = 0.0;
    /// Measured mode only: fitted decay rates and relative rms residual of the fit.
    std::vector<double> fitted_rates;
    double fit_residual = 0.0;

    double operator()(double nu) const { return evaluator(nu); }
};

/// Lower end of the scan, max(10, 2 max|q|).
double negative_floor(double max_abs_q);

/// Ratio evaluated through solve_phi.
RatioTrace synthetic_trace(const Potential& q, RatioKind kind, double nu_hi, const PhiOptions& opts = {});

struct MeasuredOptions {
    /// Exponentials fitted beyond j_max.
    std::size_t extra_modes = 2;
    /// Fit starts once the first unfitted mode has decayed by exp(-fast_decay).
    double fast_decay = 25.0;
    /// Target rho_max * sample spacing after decimation.
    double rate_step = 0.5;
    std::size_t samples_per_mode = 40;
    /// Prior lower bound for the scan (measured data carry no max|q|).
    double nu_floor = 10.0;
};

/// Ratio continued to real nu from a simulated record: the pre-fit part of
/// the record is integrated against exp(nu t) exactly for piecewise-linear data,
/// the remainder is a sum of exponentials fitted by the matrix-pencil method.
RatioTrace measured_trace(const PulseRecord& record, RatioKind kind, std::size_t j_max,
                          const MeasuredOptions& opts = {});

struct ExtractOptions {
    double root_tol = 1e-10;
    /// Scan step is scan_fraction * pi * max(sqrt|nu|, 1).
    double scan_fraction = 0.05;
    double pole_threshold = 1e6;
    double zero_threshold = 1e-6;
};

SpectralPair extract_two_spectra(const RatioTrace& trace, std::size_t j_max, const ExtractOptions& opts = {});

std::vector<double> extract_dirichlet_only(const RatioTrace& trace, std::size_t j_max,
                                           const ExtractOptions& opts = {});

}  // namespace heatinv

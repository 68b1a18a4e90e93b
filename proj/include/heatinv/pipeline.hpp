#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "heatinv/config.hpp"
#include "heatinv/kernel_recovery.hpp"
#include "heatinv/sturm_liouville.hpp"
#include "heatinv/volterra_solver.hpp"

namespace heatinv {

struct RunReport {
    std::string command;
    std::string config_echo;
    SpectralPair spectra;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<double> norm_history;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, double>> timings;
    std::vector<std::string> files;
    bool show_timings = false;

    void set(const std::string& name, double value);
    /// NaN when absent.
    double metric(const std::string& name) const;
    std::string text() const;
};

struct ReconstructOptions {
    RecoveryOptions recovery;
    FixedPointOptions iteration;
};

/// Spectra -> boundary kernel -> Volterra iteration -> q.
struct Reconstruction {
    K1Recovery k1;
    K1xRecovery k1x;
    BoundaryKernel boundary;
    FixedPointResult iteration;
    ExtractedPotential potential;
};

Reconstruction reconstruct(const SpectralPair& spectra, std::size_t n_nodes, const ReconstructOptions& opts = {});

ReconstructOptions reconstruct_options(const ExperimentConfig& cfg);

/// Runs one of forward, invert, roundtrip, nonuniqueness, plot-data and writes
/// its files under cfg.out. Errors carry a "[stage]" prefix.
RunReport run_command(const ExperimentConfig& cfg, const std::string& command);

RunReport cmd_forward(const ExperimentConfig& cfg);
RunReport cmd_invert(const ExperimentConfig& cfg);
RunReport cmd_roundtrip(const ExperimentConfig& cfg);
RunReport cmd_nonuniqueness(const ExperimentConfig& cfg);
RunReport cmd_plot_data(const ExperimentConfig& cfg);

}  // namespace heatinv

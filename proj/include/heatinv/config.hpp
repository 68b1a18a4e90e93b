#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "heatinv/heat_sim.hpp"
#include "heatinv/potential.hpp"

namespace heatinv {

/// Flat key = value experiment description. Unknown keys are rejected.
struct ExperimentConfig {
    /// Whitelisted expression: sum of constants, c*x, c*sin(k*pi*x), c*cos(k*pi*x).
    std::string potential = "0";
    std::string potential_file;
    std::size_t n_nodes = 201;
    std::size_t j_max = 16;
    double tol_root = 1e-10;
    double tol_iter = 1e-8;
    /// Laplace tail tolerance.
    double tol_quad = 1e-6;
    std::size_t max_iter = 100;
    double pulse_T = 0.2;
    std::string pulse_shape = "polynomial";
    double pulse_amplitude = 1.0;
    std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    std::size_t m_steps = 4000;
    /// 0 selects max(5 T, 3 / lambda_min).
    double t_end = 0.0;
    std::string mode = "synthetic";
    std::string out = "out";
    std::string input;
    std::size_t tail_factor = 8;
    bool seed_free = false;
    bool timings = false;
    /// True once potential or potential_file was given explicitly.
    bool truth_known = false;

    void set(const std::string& key, const std::string& value);
    void load_text(const std::string& text);
    void load_file(const std::string& path);
    /// Throws Config errors for out-of-range values.
    void validate() const;

    /// key = value lines in a fixed order; load_text(echo()) reproduces the config.
    std::string echo() const;

    Potential make_potential() const;
    PulseSpec make_pulse() const;
};

/// Parse a whitelisted expression into a callable on [0,1].
struct PotentialExpression {
    struct Term {
        enum Kind { Constant, Linear, Sine, Cosine } kind;
        double coeff;
        double freq;  // multiple of pi for Sine/Cosine
    };
    std::vector<Term> terms;

    static PotentialExpression parse(const std::string& text);
    double operator()(double x) const;
};

/// Reads "x q" rows (optional header / # comments); the grid must be uniform.
Potential read_potential_file(const std::string& path);

}  // namespace heatinv

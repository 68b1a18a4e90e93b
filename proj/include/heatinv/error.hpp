#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace heatinv {

enum class ErrorKind {
    InvalidArgument,
    IntegrationFailure,
    RootBracketing,
    InternalConsistency,
    Simulation,
    NearPole,
    ExtractionConsistency,
    Range,
    Recovery,
    NonConvergence,
    Divergence,
    Domain,
    Config,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable kind. Numeric payloads (norm
/// histories, offending indices) travel in `details`.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::vector<double> details = {});

    ErrorKind kind() const noexcept { return kind_; }
    const std::vector<double>& details() const noexcept { return details_; }

private:
    ErrorKind kind_;
    std::vector<double> details_;
};

/// Prefix an error with the pipeline stage that raised it, keeping kind and payload.
[[noreturn]] void rethrow_with_stage(const std::string& stage, const Error& e);

}  // namespace heatinv

#include "heatinv/error.hpp"

namespace heatinv {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::IntegrationFailure: return "integration-failure";
        case ErrorKind::RootBracketing: return "root-bracketing";
        case ErrorKind::InternalConsistency: return "internal-consistency";
        case ErrorKind::Simulation: return "simulation";
        case ErrorKind::NearPole: return "near-pole";
        case ErrorKind::ExtractionConsistency: return "extraction-consistency";
        case ErrorKind::Range: return "range";
        case ErrorKind::Recovery: return "recovery";
        case ErrorKind::NonConvergence: return "non-convergence";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::vector<double> details)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      details_(std::move(details)) {}

void rethrow_with_stage(const std::string& stage, const Error& e) {
    throw Error(e.kind(), "[" + stage + "] " + e.what(), e.details());
}

}  // namespace heatinv

#include "acd/errors.hpp"

namespace acd {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::FilterOverflow: return "filter-overflow";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::SingularInformation: return "singular-information";
    case ErrorKind::EmptySeries: return "empty-series";
    case ErrorKind::Ingest: return "ingest";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Inconsistent: return "inconsistent";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
    case ErrorKind::Ingest:
      return 2;
    default:
      return 3;
  }
}

}  // namespace acd

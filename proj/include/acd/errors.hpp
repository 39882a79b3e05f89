#pragma once

#include <stdexcept>
#include <string>

namespace acd {

enum class ErrorKind {
  Config,               // bad user input or configuration
  Domain,               // parameters outside the admissible region
  Solver,               // quadrature or root-finding failure
  FilterOverflow,       // non-finite conditional duration
  NonConvergence,       // optimizer gave up on every start
  SingularInformation,  // information matrix cannot be inverted
  EmptySeries,          // no events inside the span
  Ingest,               // malformed trade tape
  Calibration,          // span calibration could not bracket the target
  Inconsistent,         // internally inconsistent results (e.g. negative QLR)
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Exit code used by the command-line tool: 2 for usage/config problems,
// 3 for numerical failures.
int exit_code(ErrorKind kind) noexcept;

}  // namespace acd

#pragma once

#include <stdexcept>
#include <string>

namespace sparseanom {

// Error categories. The CLI maps each category onto its exit code.
enum class ErrorCode {
  invalid_argument,     // bad parameter or unknown enum value
  bad_magic,
  malformed,            // truncated or inconsistent file contents
  checksum,
  dimension_mismatch,
  io,                   // cannot open / read / write
  numeric,              // non-convergence or breakdown
  infeasible,
  missing_requirement,  // e.g. NC detector on an unblocked dictionary
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

// Process exit code for an error category:
// 0 ok, 2 usage, 3 format, 4 numeric, 5 infeasible, 6 dimension, 7 requirement, 8 io.
int exit_code(ErrorCode code) noexcept;

}  // namespace sparseanom

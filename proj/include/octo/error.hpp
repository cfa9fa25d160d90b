#pragma once

#include <stdexcept>
#include <string>

namespace octo {

enum class ErrorCode {
  invalid_argument = 1,
  schedule_invalid,
  not_converged,
  not_differentiable,
  parse_error,
  degenerate_plane,
  dimension_mismatch,
  out_of_range,
  hypothesis_failure,
};

/// Every failure raised by the library carries one of the codes above so the
/// C layer can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace octo

#pragma once

#include <stdexcept>
#include <string>

namespace qbound {

enum class ErrorCode {
  invalid_argument,
  invalid_channel,
  alphabet_mismatch,
  not_in_p_pi,
  singular_system,
  periodic_class,
  not_certified,
  extraction_failed,
  io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qbound

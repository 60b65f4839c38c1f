#pragma once

#include <stdexcept>
#include <string>

namespace athn {

enum class Errc {
  // input errors
  invalid_argument,
  parse_error,
  missing_pair,
  empty_input,
  fewer_than_two_hubs,
  unmapped_hub,
  inconsistent_fixing,
  // solver outcomes
  limit_reached,
  // broken internal invariant
  invariant_violation,
};

const char* to_string(Errc code);

// Every module reports failures through this exception. The CLI maps the
// category of the code onto its exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  bool is_input_error() const noexcept {
    return code_ != Errc::limit_reached && code_ != Errc::invariant_violation;
  }

 private:
  Errc code_;
};

}  // namespace athn

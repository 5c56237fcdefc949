#pragma once

#include <stdexcept>
#include <string>

namespace iofm {

enum class Errc {
  invalid_reference,
  illegal_transition,
  access_denied,
  stale_tick,
  conversion_error,
  range_error,
  routing_error,
  capability_unsupported,
  scope_error,
  precondition_failed,
  validation_failed,
  empty_input,
  misuse,
  parse_error,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace iofm

#include "iofm/errors.hpp"
#include "iofm/jsonio.hpp"
#include "iofm/log.hpp"

#include <cstdio>
#include <cstdlib>

namespace iofm {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_reference: return "invalid-reference";
    case Errc::illegal_transition: return "illegal-transition";
    case Errc::access_denied: return "access-denied";
    case Errc::stale_tick: return "stale-tick";
    case Errc::conversion_error: return "conversion-error";
    case Errc::range_error: return "range-error";
    case Errc::routing_error: return "routing-error";
    case Errc::capability_unsupported: return "capability-unsupported";
    case Errc::scope_error: return "scope-error";
    case Errc::precondition_failed: return "precondition-failed";
    case Errc::validation_failed: return "validation-failed";
    case Errc::empty_input: return "empty-input";
    case Errc::misuse: return "misuse";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

} // namespace iofm

namespace iofm::log {

Level level() {
  static Level lv = [] {
    const char* env = std::getenv("IOFM_LOG_LEVEL");
    if (env == nullptr) return Level::error;
    std::string s(env);
    if (s == "debug") return Level::debug;
    if (s == "info") return Level::info;
    return Level::error;
  }();
  return lv;
}

void write(Level lv, const std::string& msg) {
  if (static_cast<int>(lv) > static_cast<int>(level())) return;
  const char* tag = lv == Level::error ? "error" : lv == Level::info ? "info" : "debug";
  std::fprintf(stderr, "[iofm %s] %s\n", tag, msg.c_str());
}

} // namespace iofm::log

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace iofm {

// All serialized artifacts (records, envelopes, trace and audit lines) use
// insertion-ordered objects so the byte layout of a dump is a pure function
// of the data. Checksums are computed over these canonical bytes.
using ojson = nlohmann::ordered_json;

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// 16-hex-digit FNV-1a tag over a canonical serialization.
inline std::string checksum_hex(std::string_view bytes) { return hex64(fnv1a64(bytes)); }

inline std::string dump_compact(const ojson& j) { return j.dump(); }

} // namespace iofm

#ifndef XLING_COMMON_HPP
#define XLING_COMMON_HPP

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace xling {

// Malformed or inconsistent input data (maps to CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller misuse: bad arguments, impossible configurations (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Prints a double with enough digits to round-trip exactly through strtod.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// FNV-1a 64-bit. Used to derive per-cell seeds from (master seed, cell key).
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, const std::string& key) {
  return fnv1a64(std::to_string(master) + "|" + key);
}

// Code-point count of a UTF-8 string (continuation bytes not counted).
inline std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace xling

#endif

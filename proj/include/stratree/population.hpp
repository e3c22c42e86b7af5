#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stratree {

/// Exact vertex counts. Level populations of deep trees overflow 64 bits
/// long before the tridiagonal path stops being cheap (3^49 > 2^64), so
/// spectrum-only code counts in 128 bits.
__extension__ typedef unsigned __int128 Count;

/// Malformed tree description (zero children, bad identity, empty subset...).
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arithmetic or size limit hit: population overflow, oracle cap, basis cap.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Count checked_add(Count a, Count b) {
  Count r = a + b;
  if (r < a) throw ResourceLimit("population overflow (exceeds 128-bit count)");
  return r;
}

inline Count checked_mul(Count a, Count b) {
  if (a != 0 && b > static_cast<Count>(~Count{0}) / a)
    throw ResourceLimit("population overflow (exceeds 128-bit count)");
  return a * b;
}

inline std::string to_string(Count value) {
  if (value == 0) return "0";
  std::string digits;
  while (value != 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  return digits;
}

}  // namespace stratree

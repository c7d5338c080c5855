#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sca {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Malformed arguments: length mismatch, alphabet mismatch, wrong shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NotCfca : public Error {
 public:
  NotCfca() : Error("SCA is not correlation-free (V' != {0})") {}
};

class NotDeterministic : public Error {
 public:
  NotDeterministic() : Error("SCA is not deterministic") {}
};

class ResourceExhausted : public Error {
 public:
  using Error::Error;
};

// Explicit enumeration limits. Exceeding one raises ResourceExhausted.
struct Budget {
  std::uint64_t max_table = std::uint64_t{1} << 24;   // rule table entries
  std::uint64_t max_enum = std::uint64_t{1} << 26;    // enumerated words/paths
  std::uint64_t max_states = std::uint64_t{1} << 20;  // automaton / subset states
  std::uint64_t max_period = std::uint64_t{1} << 20;  // periodic configurations
};

// Throws ResourceExhausted when value > limit.
void require_within(std::uint64_t value, std::uint64_t limit, const std::string& what);

// Saturating |base|^exp (returns UINT64_MAX on overflow).
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp);

}  // namespace sca

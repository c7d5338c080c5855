#pragma once

#include <random>
#include <vector>

#include "sca/errors.hpp"
#include "sca/word.hpp"

namespace sca::testing {

// All words of length `len` over `radix` symbols, or `cap` seeded samples
// when there are more than `cap`.
inline std::vector<Symbols> windows(std::size_t radix, std::size_t len, std::size_t cap = 256,
                                    unsigned seed = 1) {
  std::vector<Symbols> out;
  if (checked_pow(radix, len) <= cap) {
    Symbols w(len, 0);
    do out.push_back(w);
    while (next_word(w, radix));
    return out;
  }
  std::mt19937 gen(seed);
  for (std::size_t i = 0; i < cap; ++i) {
    Symbols w(len);
    for (auto& x : w) x = static_cast<Symbol>(gen() % radix);
    out.push_back(w);
  }
  return out;
}

}  // namespace sca::testing

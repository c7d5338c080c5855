#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sca {

using Symbol = std::uint32_t;
using Symbols = std::vector<Symbol>;

// Ordered set of distinct printable tokens. The order is used by every
// canonical enumeration.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(Symbol s) const { return tokens_.at(s); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<Symbol> find(std::string_view token) const;
  // Throws ParseError for unknown tokens.
  Symbol index(std::string_view token) const;

  // Splits on whitespace when present, otherwise tokenizes greedily by
  // longest match with backtracking. Throws ParseError.
  Symbols parse(std::string_view text) const;
  // Concatenates tokens; separates them by spaces if any token is longer
  // than one code point.
  std::string format(const Symbols& word) const;
  bool single_codepoint_tokens() const { return single_; }

  bool operator==(const Alphabet& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Symbol> index_;
  bool single_ = true;
};

// Token for a tuple of tokens: "(ab)" for single code points, "(a,b)" otherwise.
std::string tuple_token(const std::vector<std::string>& parts);

// Alphabet of all tuples of length m over `base` in lexicographic order;
// m = 1 returns `base` unchanged.
Alphabet power_alphabet(const Alphabet& base, std::size_t m);
// Alphabet of pairs (a, b), a-major.
Alphabet product_alphabet(const Alphabet& a, const Alphabet& b);

std::size_t codepoints(std::string_view utf8);

// Finite word placed at `offset`.
struct Word {
  Symbols symbols;
  long offset = 0;

  std::size_t size() const { return symbols.size(); }
  bool operator==(const Word& o) const = default;
};

// Bi-infinite configuration: cell z holds period[(z - phase) mod |period|].
struct PeriodicConfig {
  Symbols period;
  long phase = 0;

  Symbol at(long z) const;
  bool operator==(const PeriodicConfig& o) const = default;
};

// Mixed-radix index of a word (first symbol most significant).
std::uint64_t word_index(const Symbol* w, std::size_t len, std::uint64_t radix);
void word_from_index(std::uint64_t index, std::size_t len, std::uint64_t radix, Symbol* out);

// Advances `w` to the next word in lexicographic order; false on wrap-around.
bool next_word(Symbols& w, std::size_t radix);

}  // namespace sca

#include "sca/word.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "sca/errors.hpp"

namespace sca {

std::size_t codepoints(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

Alphabet::Alphabet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw ParseError("alphabet is empty");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const auto& t = tokens_[i];
    if (t.empty()) throw ParseError("alphabet contains an empty token");
    for (unsigned char c : t)
      if (std::isspace(c) || c == '|') throw ParseError("token \"" + t + "\" contains whitespace or '|'");
    if (!index_.emplace(t, static_cast<Symbol>(i)).second)
      throw ParseError("duplicate token \"" + t + "\"");
    if (codepoints(t) != 1) single_ = false;
  }
}

std::optional<Symbol> Alphabet::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Symbol Alphabet::index(std::string_view token) const {
  auto s = find(token);
  if (!s) throw ParseError("symbol \"" + std::string(token) + "\" not in alphabet");
  return *s;
}

Symbols Alphabet::parse(std::string_view text) const {
  bool spaced = false;
  for (unsigned char c : text)
    if (std::isspace(c)) spaced = true;
  Symbols out;
  if (spaced) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i) out.push_back(index(text.substr(i, j - i)));
      i = j;
    }
    return out;
  }
  // Longest-match tokenization with backtracking (memoized dead ends).
  std::vector<char> dead(text.size() + 1, 0);
  std::size_t max_len = 0;
  for (const auto& t : tokens_) max_len = std::max(max_len, t.size());
  std::function<bool(std::size_t)> go = [&](std::size_t pos) -> bool {
    if (pos == text.size()) return true;
    if (dead[pos]) return false;
    for (std::size_t len = std::min(max_len, text.size() - pos); len > 0; --len) {
      auto s = find(text.substr(pos, len));
      if (!s) continue;
      out.push_back(*s);
      if (go(pos + len)) return true;
      out.pop_back();
    }
    dead[pos] = 1;
    return false;
  };
  if (!go(0)) throw ParseError("cannot tokenize \"" + std::string(text) + "\"");
  return out;
}

std::string Alphabet::format(const Symbols& word) const {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i > 0 && !single_) out += ' ';
    out += token(word[i]);
  }
  return out;
}

std::string tuple_token(const std::vector<std::string>& parts) {
  bool single = true;
  for (const auto& p : parts)
    if (codepoints(p) != 1) single = false;
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0 && !single) out += ',';
    out += parts[i];
  }
  return out + ")";
}

Alphabet power_alphabet(const Alphabet& base, std::size_t m) {
  if (m == 1) return base;
  std::vector<std::string> tokens;
  Symbols w(m, 0);
  do {
    std::vector<std::string> parts;
    for (Symbol s : w) parts.push_back(base.token(s));
    tokens.push_back(tuple_token(parts));
  } while (next_word(w, base.size()));
  return Alphabet(std::move(tokens));
}

Alphabet product_alphabet(const Alphabet& a, const Alphabet& b) {
  std::vector<std::string> tokens;
  for (const auto& x : a.tokens())
    for (const auto& y : b.tokens()) tokens.push_back(tuple_token({x, y}));
  return Alphabet(std::move(tokens));
}

Symbol PeriodicConfig::at(long z) const {
  long p = static_cast<long>(period.size());
  long i = ((z - phase) % p + p) % p;
  return period[static_cast<std::size_t>(i)];
}

std::uint64_t word_index(const Symbol* w, std::size_t len, std::uint64_t radix) {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < len; ++i) idx = idx * radix + w[i];
  return idx;
}

void word_from_index(std::uint64_t index, std::size_t len, std::uint64_t radix, Symbol* out) {
  for (std::size_t i = len; i-- > 0;) {
    out[i] = static_cast<Symbol>(index % radix);
    index /= radix;
  }
}

bool next_word(Symbols& w, std::size_t radix) {
  for (std::size_t i = w.size(); i-- > 0;) {
    if (++w[i] < radix) return true;
    w[i] = 0;
  }
  return false;
}

}  // namespace sca

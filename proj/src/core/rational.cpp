#include "sca/rational.hpp"

#include "sca/errors.hpp"

namespace sca {

std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return ParseError("invalid rational \"" + s + "\""); };
  if (s.empty()) throw bad();
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  auto digits = [](const std::string& d, bool allow_sign) {
    std::size_t i = allow_sign && !d.empty() && d[0] == '-' ? 1 : 0;
    if (i == d.size()) return false;
    for (; i < d.size(); ++i)
      if (d[i] < '0' || d[i] > '9') return false;
    return true;
  };
  if (!digits(num, true) || !digits(den, false)) throw bad();
  Integer n(num), d(den);
  if (d == 0) throw bad();
  return make_rational(n, d);
}

Rational make_rational(const Integer& num, const Integer& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Integer pow(const Integer& base, unsigned long exp) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
  return out;
}

Rational pow(const Rational& base, unsigned long exp) {
  return make_rational(pow(base.get_num(), exp), pow(base.get_den(), exp));
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

void require_within(std::uint64_t value, std::uint64_t limit, const std::string& what) {
  if (value > limit)
    throw ResourceExhausted(what + " exceeds budget (" +
                            (value == UINT64_MAX ? std::string("overflow") : std::to_string(value)) +
                            " > " + std::to_string(limit) + ")");
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && out > UINT64_MAX / base) return UINT64_MAX;
    out *= base;
  }
  return out;
}

}  // namespace sca

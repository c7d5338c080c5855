#include <sstream>

#include "sca/ppt_pfa.hpp"

namespace sca {

Threshold Threshold::exponential(Rational alpha, Rational lambda) {
  if (alpha <= 0) throw ShapeError("threshold: alpha must be positive");
  if (lambda <= 0 || lambda >= 1) throw ShapeError("threshold: lambda must lie in (0,1)");
  Threshold t;
  t.kind = Kind::Exponential;
  t.alpha = alpha;
  t.lambda = lambda;
  return t;
}

Threshold Threshold::superexponential(Rational theta, Rational c, unsigned d) {
  if (theta < 0) throw ShapeError("threshold: theta must be non-negative");
  if (c <= 0) throw ShapeError("threshold: c must be positive");
  if (d == 0) throw ShapeError("threshold: d must be a positive integer");
  Threshold t;
  t.kind = Kind::Superexponential;
  t.theta = theta;
  t.c = c;
  t.d = d;
  return t;
}

Threshold Threshold::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("threshold must be exp:alpha,lambda or sup:theta,c,d");
  std::string kind = text.substr(0, colon);
  std::vector<std::string> parts;
  std::stringstream ss(text.substr(colon + 1));
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (kind == "exp" && parts.size() == 2)
    return exponential(parse_rational(parts[0]), parse_rational(parts[1]));
  if (kind == "sup" && parts.size() == 3) {
    Rational d = parse_rational(parts[2]);
    if (d.get_den() != 1 || d <= 0 || !d.get_num().fits_uint_p())
      throw ParseError("threshold: d must be a positive integer");
    return superexponential(parse_rational(parts[0]), parse_rational(parts[1]),
                            static_cast<unsigned>(d.get_num().get_ui()));
  }
  throw ParseError("threshold must be exp:alpha,lambda or sup:theta,c,d");
}

Rational Threshold::at(std::uint64_t n) const {
  if (kind == Kind::Exponential) return alpha * pow(lambda, n);
  return theta + c / Rational(pow(Integer(static_cast<unsigned long>(n + 1)), d));
}

std::string Threshold::describe() const {
  if (kind == Kind::Exponential) return "exp:" + to_string(alpha) + "," + to_string(lambda);
  return "sup:" + to_string(theta) + "," + to_string(c) + "," + std::to_string(d);
}

}  // namespace sca

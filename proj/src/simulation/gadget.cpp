#include "sca/simulation.hpp"

namespace sca {

GadgetKind parse_gadget_kind(const std::string& text) {
  if (text == "lift" || text == "surjectivity-lift" || text == "SurjectivityLift")
    return GadgetKind::SurjectivityLift;
  if (text == "square" || text == "square-noise" || text == "SquareNoise")
    return GadgetKind::SquareNoise;
  throw ParseError("gadget kind must be lift or square");
}

Sca gadget(GadgetKind kind, const Sca& f, const Budget& budget) {
  if (!is_deterministic(f)) throw NotDeterministic();
  const std::vector<Symbol> table = deterministic_table(f);
  const std::size_t nq = f.states().size(), nv = f.v().size();
  const Alphabet random(f.states().tokens());
  if (kind == GadgetKind::SurjectivityLift)
    return Sca::from_rule(
        f.states(), random, {0}, f.v(),
        [&](auto, std::span<const Symbol> s) { return table[word_index(s.data(), nv, nq)]; },
        budget);
  Symbols inner(nv);
  return Sca::from_rule(
      product_alphabet(f.states(), f.states()), random, f.v(), {0},
      [&](std::span<const Symbol> q, std::span<const Symbol> s) {
        for (std::size_t j = 0; j < nv; ++j) inner[j] = static_cast<Symbol>(q[j] % nq);
        return static_cast<Symbol>(table[word_index(inner.data(), nv, nq)] * nq + s[0]);
      },
      budget);
}

}  // namespace sca

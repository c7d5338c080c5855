#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "sca/core.hpp"
#include "sca/simulation.hpp"
#include "sca/weighted.hpp"

namespace sca {

namespace {

// Central output word of length 2n+1 for every random word, in lexicographic
// order of random words.
std::map<Symbols, std::vector<Symbols>> partition(const Sca& s, const Symbols& window, int n,
                                                  int k, const Budget& budget) {
  const std::size_t len = window.size(), nr = s.random().size();
  require_within(checked_pow(nr, len), budget.max_enum, "coupling random words");
  const auto skip = static_cast<std::size_t>(k - s.radius());
  const auto width = static_cast<std::size_t>(2 * n + 1);
  std::map<Symbols, std::vector<Symbols>> groups;
  Symbols v(len, 0);
  do {
    Word out = apply_window(s, Word{window, 0}, Word{v, 0});
    Symbols u(out.symbols.begin() + static_cast<long>(skip),
              out.symbols.begin() + static_cast<long>(skip + width));
    groups[u].push_back(v);
  } while (next_word(v, nr));
  return groups;
}

}  // namespace

CouplingResult build_finite_coupling(const Sca& a, const Sca& b_in, const Symbols& window, int n,
                                     const Budget& budget) {
  if (n < 0) throw ShapeError("coupling: n must be non-negative");
  const Sca b = align_states(a, b_in);
  const int k = std::max(a.radius(), b.radius());
  if (window.size() != static_cast<std::size_t>(2 * (n + k) + 1))
    throw ShapeError("coupling: window length must be 2(n+k)+1 = " + std::to_string(2 * (n + k) + 1));
  for (Symbol s : window)
    if (s >= a.states().size()) throw ShapeError("coupling: window symbol out of range");

  const auto g1 = partition(a, window, n, k, budget), g2 = partition(b, window, n, k, budget);
  const Integer n1 = pow(Integer(static_cast<unsigned long>(a.random().size())), window.size());
  const Integer n2 = pow(Integer(static_cast<unsigned long>(b.random().size())), window.size());
  auto size_of = [](const auto& g, const Symbols& u) {
    auto it = g.find(u);
    return it == g.end() ? 0ul : it->second.size();
  };
  std::set<Symbols> outputs;
  for (const auto& [u, vs] : g1) outputs.insert(u);
  for (const auto& [u, vs] : g2) outputs.insert(u);

  CouplingResult res;
  for (const auto& u : outputs) {
    Rational p1 = make_rational(Integer(size_of(g1, u)), n1);
    Rational p2 = make_rational(Integer(size_of(g2, u)), n2);
    if (p1 != p2) {
      res.mismatch = u;
      res.prob_a = p1;
      res.prob_b = p2;
      return res;
    }
  }

  CouplingTable table;
  table.window = window;
  table.n = n;
  table.radius = k;
  for (const auto& u : outputs) {
    const auto& v1 = g1.at(u);
    const auto& v2 = g2.at(u);
    const Rational mu = make_rational(Integer(v1.size()), n1);
    const Rational w1(1, v1.size()), w2(1, v2.size());
    std::size_t i = 0, j = 0;
    Rational lo = 0;
    while (i < v1.size() && j < v2.size()) {
      Rational hi = std::min(w1 * (i + 1), w2 * (j + 1));
      if (hi > lo) table.entries.push_back({v1[i], v2[j], (hi - lo) * mu});
      lo = hi;
      if (hi == w1 * (i + 1)) ++i;
      if (hi == w2 * (j + 1)) ++j;
    }
  }
  std::sort(table.entries.begin(), table.entries.end(), [](const auto& x, const auto& y) {
    return std::tie(x.r1, x.r2) < std::tie(y.r1, y.r2);
  });

  // Certificate: exact marginals and the mass of equal outputs.
  std::map<Symbols, Rational> m1, m2;
  table.equal_output_mass = 0;
  const auto skip_a = static_cast<std::size_t>(k - a.radius()), skip_b = static_cast<std::size_t>(k - b.radius());
  const auto width = static_cast<long>(2 * n + 1);
  for (const auto& e : table.entries) {
    m1[e.r1] += e.mass;
    m2[e.r2] += e.mass;
    Word oa = apply_window(a, Word{window, 0}, Word{e.r1, 0});
    Word ob = apply_window(b, Word{window, 0}, Word{e.r2, 0});
    if (std::equal(oa.symbols.begin() + static_cast<long>(skip_a),
                   oa.symbols.begin() + static_cast<long>(skip_a) + width,
                   ob.symbols.begin() + static_cast<long>(skip_b)))
      table.equal_output_mass += e.mass;
  }
  const Rational u1 = make_rational(Integer(1), n1), u2 = make_rational(Integer(1), n2);
  table.marginals_uniform = Integer(m1.size()) == n1 && Integer(m2.size()) == n2 &&
                            std::all_of(m1.begin(), m1.end(), [&](const auto& p) { return p.second == u1; }) &&
                            std::all_of(m2.begin(), m2.end(), [&](const auto& p) { return p.second == u2; });
  res.table = std::move(table);
  res.prob_a = res.prob_b = 1;
  return res;
}

}  // namespace sca

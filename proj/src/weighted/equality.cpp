#include <algorithm>
#include <optional>
#include <set>

#include "sca/core.hpp"
#include "sca/weighted.hpp"

namespace sca {

namespace {

bool shares_prime(std::uint64_t x, std::uint64_t y) {
  auto px = prime_factors(x), py = prime_factors(y);
  for (auto p : px)
    if (std::find(py.begin(), py.end(), p) != py.end()) return true;
  return false;
}

PairWord split_letters(const Symbols& letters, std::size_t q_size) {
  PairWord m;
  for (Symbol s : letters) {
    if (s < q_size) {
      m.prologue.push_back(s);
    } else {
      const Symbol p = static_cast<Symbol>(s - q_size);
      m.body.emplace_back(p / static_cast<Symbol>(q_size), p % static_cast<Symbol>(q_size));
    }
  }
  return m;
}

Symbols centre(const Symbols& v, std::size_t cut) {
  return Symbols(v.begin() + static_cast<long>(cut), v.end() - static_cast<long>(cut));
}

// Seeded search for a short window whose one-step output probabilities
// differ. Cheap next to the automata when the radii are far apart.
std::optional<EqualityResult> refute_by_sampling(const Sca& a, const Sca& b) {
  constexpr int kTrials = 64;
  const std::size_t ka = static_cast<std::size_t>(a.radius()), kb = static_cast<std::size_t>(b.radius());
  const std::size_t k = std::max(ka, kb);
  Rng rng(0x5ca);
  for (int trial = 0; trial < kTrials; ++trial) {
    Symbols v(2 * k + 1 + static_cast<std::size_t>(trial % 3));
    for (auto& x : v) x = static_cast<Symbol>(rng.below(a.states().size()));
    const Symbols va = centre(v, k - ka), vb = centre(v, k - kb);
    const Symbols u = trial % 2 == 0 ? sample_window(a, Word{va, 0}, 1, rng).symbols
                                     : sample_window(b, Word{vb, 0}, 1, rng).symbols;
    const Rational pa = window_probability(a, va, u), pb = window_probability(b, vb, u);
    if (pa == pb) continue;
    EqualityResult r;
    r.equal = false;
    r.witness = encode_pair_word(v, u, 2 * k + 1);
    r.prob_a = pa;
    r.prob_b = pb;
    r.radius = static_cast<int>(k);
    return r;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(Precheck p) {
  switch (p) {
    case Precheck::Incompatible: return "incompatible";
    case Precheck::Compatible: return "compatible";
    case Precheck::SomeDeterministic: return "some-deterministic";
  }
  return "?";
}

Precheck prime_factor_precheck(const Sca& a, const Sca& b) {
  if (is_deterministic(a) || is_deterministic(b)) return Precheck::SomeDeterministic;
  return shares_prime(a.random().size(), b.random().size()) ? Precheck::Compatible
                                                            : Precheck::Incompatible;
}

Sca align_states(const Sca& a, const Sca& b) {
  if (a.states() == b.states()) return b;
  std::set<std::string> ta(a.states().tokens().begin(), a.states().tokens().end());
  std::set<std::string> tb(b.states().tokens().begin(), b.states().tokens().end());
  if (ta != tb) throw ShapeError("state alphabets differ");
  return relabel_states(b, a.states());
}

std::pair<Sca, Sca> common_radius(const Sca& a, const Sca& b, const Budget& budget) {
  Sca x = minimize_neighborhoods(a, budget);
  Sca y = minimize_neighborhoods(b, budget);
  const int k = std::max(x.radius(), y.radius());
  return {pad_for_automaton(x, k, budget), pad_for_automaton(y, k, budget)};
}

EqualityResult stochastic_equal_detail(const Sca& a, const Sca& b_in, int t, bool use_precheck,
                                       const Budget& budget) {
  const Sca b = align_states(a, b_in);
  EqualityResult r;
  r.precheck = prime_factor_precheck(a, b);
  if (use_precheck && r.precheck == Precheck::Incompatible) {
    r.equal = false;
    r.decided_by_precheck = true;
    return r;
  }
  if (t < 1) throw ShapeError("t must be positive");
  // Same explicit global function, hence the same process at every t.
  if (const Sca ma = minimize_neighborhoods(a, budget); ma == minimize_neighborhoods(b, budget)) {
    r.radius = ma.radius() * t;
    return r;
  }
  if (t == 1)
    if (auto refuted = refute_by_sampling(a, b)) {
      refuted->precheck = r.precheck;
      return *refuted;
    }
  auto [x, y] = common_radius(a, b, budget);
  r.radius = x.radius() * t;
  auto cmp = wa_compare(iterate_automaton(x, t, budget), iterate_automaton(y, t, budget));
  r.equal = cmp.equivalent;
  if (cmp.witness) {
    r.witness = split_letters(*cmp.witness, a.states().size());
    r.prob_a = cmp.weight1;
    r.prob_b = cmp.weight2;
  }
  return r;
}

bool stochastic_equal(const Sca& a, const Sca& b, int t, const Budget& budget) {
  return stochastic_equal_detail(a, b, t, true, budget).equal;
}

}  // namespace sca

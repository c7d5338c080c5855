#include "sca/core.hpp"

namespace sca {

std::vector<long> state_values(const Sca& a) {
  if (a.values()) return *a.values();
  std::vector<long> out;
  for (const auto& tok : a.states().tokens()) {
    try {
      std::size_t used = 0;
      long v = std::stol(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ShapeError("state \"" + tok + "\" has no integer value; declare \"values\"");
    }
  }
  return out;
}

ConservationVerdict conservation_check(const Sca& a, int support_bound, int t,
                                       const Budget& budget) {
  if (support_bound < 0 || t < 1) throw ShapeError("support bound must be >= 0 and t >= 1");
  auto values = state_values(a);
  Symbol background = 0;
  bool found = false;
  for (Symbol s = 0; s < values.size() && !found; ++s)
    if (values[s] == 0) {
      background = s;
      found = true;
    }
  if (!found) throw ShapeError("no state with value 0 to serve as background");
  auto sum = [&](const Symbols& w) {
    long total = 0;
    for (Symbol s : w) total += values[s];
    return total;
  };

  ConservationVerdict verdict;
  // The background itself must be a fixed point, otherwise sums diverge.
  {
    Symbols q(a.v().size(), background), r(a.v_prime().size(), 0);
    do {
      Symbol out = a.apply(q.data(), r.data());
      if (out != background) {
        verdict.conserving = false;
        verdict.reason = "background is not quiescent";
        verdict.input = Word{Symbols(a.v().size(), background), 0};
        verdict.output = Word{{out}, 0};
        verdict.output_sum = values[out];
        return verdict;
      }
    } while (next_word(r, a.random().size()));
  }

  const std::size_t nq = a.states().size();
  require_within(checked_pow(nq, static_cast<std::uint64_t>(support_bound)), budget.max_enum,
                 "configuration enumeration");
  Symbols c(static_cast<std::size_t>(support_bound), 0);
  do {
    Word input{c, 0};
    std::set<Symbols> level{c};
    long offset = 0;
    for (int i = 0; i < t; ++i) {
      std::set<Symbols> next;
      for (const auto& w : level) {
        auto imgs = image_words(a, Word{w, offset}, background, budget);
        next.insert(imgs.begin(), imgs.end());
        require_within(next.size(), budget.max_enum, "reachable configurations");
      }
      level = std::move(next);
      offset -= a.radius();
    }
    const long in_sum = sum(c);
    for (const auto& w : level) {
      if (sum(w) == in_sum) continue;
      verdict.conserving = false;
      verdict.reason = "output sum differs from input sum";
      verdict.input = input;
      verdict.output = Word{w, offset};
      verdict.input_sum = in_sum;
      verdict.output_sum = sum(w);
      for (const auto& other : level)
        if (sum(other) != verdict.output_sum) {
          verdict.other_output = Word{other, offset};
          break;
        }
      return verdict;
    }
  } while (next_word(c, nq));
  return verdict;
}

}  // namespace sca

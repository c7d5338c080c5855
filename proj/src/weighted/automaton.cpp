#include <algorithm>
#include <deque>
#include <map>

#include "sca/weighted.hpp"

namespace sca {

namespace {

using Sparse = WeightVector;

std::uint64_t level_size(std::uint64_t radix, std::size_t j) { return checked_pow(radix, j); }

// Offsets of the levels 0..ell-1 in the global state numbering.
std::vector<std::size_t> level_offsets(std::uint64_t radix, std::size_t ell, const Budget& budget) {
  std::vector<std::size_t> off;
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < ell; ++j) {
    off.push_back(total);
    total += level_size(radix, j);
    require_within(total, budget.max_states, "weighted automaton states");
  }
  off.push_back(total);
  return off;
}

std::string join_tokens(const Alphabet& a, const Symbols& w) {
  std::string s;
  for (Symbol x : w) s += a.token(x);
  return s;
}

void init_common(WeightedAutomaton& w, const Alphabet& states, std::size_t count) {
  w.alphabet = sigma_alphabet(states);
  w.q_size = states.size();
  w.transitions.assign(w.alphabet.size(), {});
  w.final.assign(count, false);
  w.state_names.resize(count);
  w.initial = 0;
}


// Block index per state, blocks numbered by first occurrence.
std::vector<std::size_t> lumping_partition(const WeightedAutomaton& w) {
  const std::size_t n = w.state_count();
  std::vector<std::size_t> block(n);
  for (std::size_t i = 0; i < n; ++i) block[i] = w.final[i] ? 1 : 0;
  std::size_t blocks = 0;
  using Signature = std::pair<std::size_t, std::vector<std::tuple<Symbol, std::size_t, Rational>>>;
  while (true) {
    std::vector<std::map<std::pair<Symbol, std::size_t>, Rational>> out(n);
    for (std::size_t s = 0; s < w.transitions.size(); ++s)
      for (const auto& t : w.transitions[s]) out[t.from][{static_cast<Symbol>(s), block[t.to]}] += t.weight;
    std::map<Signature, std::size_t> ids;
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      Signature sig{block[i], {}};
      for (const auto& [key, wt] : out[i])
        if (wt != 0) sig.second.emplace_back(key.first, key.second, wt);
      next[i] = ids.emplace(std::move(sig), ids.size()).first->second;
    }
    const bool stable = ids.size() == blocks;
    blocks = ids.size();
    block = std::move(next);
    if (stable) break;
  }
  std::vector<std::size_t> order(blocks, SIZE_MAX);
  std::size_t next_id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (order[block[i]] == SIZE_MAX) order[block[i]] = next_id++;
    block[i] = order[block[i]];
  }
  return block;
}

WeightedAutomaton quotient(const WeightedAutomaton& w, const std::vector<std::size_t>& block) {
  std::vector<std::size_t> rep;
  for (std::size_t i = 0; i < block.size(); ++i)
    if (block[i] == rep.size()) rep.push_back(i);
  WeightedAutomaton q;
  q.alphabet = w.alphabet;
  q.q_size = w.q_size;
  q.initial = block[w.initial];
  q.transitions.assign(w.transitions.size(), {});
  for (std::size_t b = 0; b < rep.size(); ++b) {
    q.final.push_back(w.final[rep[b]]);
    q.state_names.push_back(w.state_names[rep[b]]);
  }
  for (std::size_t s = 0; s < w.transitions.size(); ++s) {
    std::map<std::pair<std::size_t, std::size_t>, Rational> acc;
    for (const auto& t : w.transitions[s])
      if (rep[block[t.from]] == t.from) acc[{block[t.from], block[t.to]}] += t.weight;
    for (const auto& [key, wt] : acc)
      if (wt != 0) q.transitions[s].push_back({key.first, key.second, wt});
  }
  return q;
}

}  // namespace

std::size_t WeightedAutomaton::transition_count() const {
  std::size_t n = 0;
  for (const auto& t : transitions) n += t.size();
  return n;
}

Symbol pair_letter(std::size_t q_size, Symbol in, Symbol out) {
  return static_cast<Symbol>(q_size + in * q_size + out);
}

Alphabet sigma_alphabet(const Alphabet& states) {
  std::vector<std::string> tokens = states.tokens();
  for (const auto& a : states.tokens())
    for (const auto& b : states.tokens()) tokens.push_back(tuple_token({a, b}));
  return Alphabet(std::move(tokens));
}

PairWord encode_pair_word(const Symbols& v, const Symbols& u, std::size_t ell) {
  if (ell == 0 || v.size() != u.size() + ell - 1)
    throw ShapeError("pair word needs |v| = |u| + ell - 1");
  PairWord m;
  m.prologue.assign(v.begin(), v.begin() + static_cast<long>(ell - 1));
  for (std::size_t i = 0; i < u.size(); ++i) m.body.emplace_back(v[ell - 1 + i], u[i]);
  return m;
}

Symbols to_letters(const PairWord& m, std::size_t q_size) {
  Symbols out = m.prologue;
  for (auto [a, b] : m.body) out.push_back(pair_letter(q_size, a, b));
  return out;
}

Sca pad_for_automaton(const Sca& a, int k, const Budget& budget) {
  if (!is_cfca(a)) return pad_to_radius(a, k, budget);
  std::vector<int> v;
  for (int i = -k; i <= k; ++i) v.push_back(i);
  return extend_neighborhoods(a, v, a.v_prime(), budget);
}

WeightedAutomaton weighted_debruijn(const Sca& a, const Budget& budget) {
  const int k = a.radius();
  const Sca c = pad_to_radius(a, k, budget);
  const std::size_t ell = 2 * static_cast<std::size_t>(k) + 1;
  const std::uint64_t nq = c.states().size(), nr = c.random().size(), qr = nq * nr;
  const auto off = level_offsets(qr, ell, budget);
  require_within(checked_pow(qr, ell), budget.max_table, "weighted automaton transitions");

  WeightedAutomaton w;
  init_common(w, c.states(), off.back());
  const Rational weight(1, static_cast<unsigned long>(nr));
  Symbols pairs(ell), q(ell), r(ell);

  for (std::size_t j = 0; j < ell; ++j) {
    const std::uint64_t size = level_size(qr, j);
    for (std::uint64_t code = 0; code < size; ++code) {
      const std::size_t from = off[j] + code;
      word_from_index(code, j, qr, pairs.data());
      for (std::size_t i = 0; i < j; ++i) {
        q[i] = pairs[i] / static_cast<Symbol>(nr);
        r[i] = pairs[i] % static_cast<Symbol>(nr);
      }
      Symbols qs(q.begin(), q.begin() + static_cast<long>(j));
      Symbols rs(r.begin(), r.begin() + static_cast<long>(j));
      w.state_names[from] = j == 0 ? "i0" : "(" + join_tokens(c.states(), qs) + "|" +
                                                  join_tokens(c.random(), rs) + ")";
      if (j + 1 < ell) {
        for (Symbol x = 0; x < nq; ++x)
          for (Symbol y = 0; y < nr; ++y)
            w.transitions[x].push_back({from, off[j + 1] + code * qr + x * nr + y, weight});
        continue;
      }
      w.final[from] = true;
      const std::uint64_t keep = level_size(qr, ell - 1);
      for (Symbol x = 0; x < nq; ++x) {
        q[ell - 1] = x;
        for (Symbol y = 0; y < nr; ++y) {
          r[ell - 1] = y;
          const Symbol out = c.apply(q.data(), r.data());
          const std::size_t to = off[j] + (code * qr + x * nr + y) % keep;
          w.transitions[pair_letter(nq, x, out)].push_back({from, to, weight});
        }
      }
    }
  }
  return w;
}

WeightedAutomaton cfca_weighted(const Sca& a, const Budget& budget) {
  if (!is_cfca(a)) throw NotCfca();
  const int k = a.radius();
  const Sca c = pad_for_automaton(a, k, budget);
  const auto ld = local_distribution(c);
  const std::size_t ell = 2 * static_cast<std::size_t>(k) + 1;
  const std::uint64_t nq = c.states().size();
  const auto off = level_offsets(nq, ell, budget);

  WeightedAutomaton w;
  init_common(w, c.states(), off.back());
  Symbols u(ell);
  for (std::size_t j = 0; j < ell; ++j) {
    const std::uint64_t size = level_size(nq, j);
    for (std::uint64_t code = 0; code < size; ++code) {
      const std::size_t from = off[j] + code;
      word_from_index(code, j, nq, u.data());
      w.state_names[from] =
          j == 0 ? "i0" : join_tokens(c.states(), Symbols(u.begin(), u.begin() + static_cast<long>(j)));
      if (j + 1 < ell) {
        for (Symbol x = 0; x < nq; ++x) w.transitions[x].push_back({from, off[j + 1] + code * nq + x, 1});
        continue;
      }
      w.final[from] = true;
      const std::uint64_t keep = level_size(nq, ell - 1);
      for (Symbol x = 0; x < nq; ++x) {
        u[ell - 1] = x;
        const auto& dist = ld.table[word_index(u.data(), ell, nq)];
        for (Symbol out = 0; out < nq; ++out)
          if (dist[out] != 0)
            w.transitions[pair_letter(nq, x, out)].push_back(
                {from, off[j] + (code * nq + x) % keep, dist[out]});
      }
    }
  }
  return w;
}

WeightVector initial_vector(const WeightedAutomaton& w) { return {{w.initial, Rational(1)}}; }

WeightVector step(const WeightedAutomaton& w, const WeightVector& x, Symbol letter) {
  WeightVector y;
  if (letter >= w.transitions.size()) return y;
  const auto& ts = w.transitions[letter];
  for (const auto& [i, v] : x) {
    auto it = std::lower_bound(ts.begin(), ts.end(), i,
                               [](const WeightedAutomaton::Transition& t, std::size_t f) { return t.from < f; });
    for (; it != ts.end() && it->from == i; ++it) {
      Rational& yt = y[it->to];
      yt += v * it->weight;
      if (yt == 0) y.erase(it->to);
    }
  }
  return y;
}

Rational final_weight(const WeightedAutomaton& w, const WeightVector& x) {
  Rational sum = 0;
  for (const auto& [i, v] : x)
    if (w.final[i]) sum += v;
  return sum;
}

Rational weight_of(const WeightedAutomaton& w, const Symbols& letters) {
  WeightVector x = initial_vector(w);
  for (Symbol s : letters) {
    x = step(w, x, s);
    if (x.empty()) return 0;
  }
  return final_weight(w, x);
}

Rational weight_of(const WeightedAutomaton& w, const PairWord& m) {
  return weight_of(w, to_letters(m, w.q_size));
}

EquivalenceResult wa_compare(const WeightedAutomaton& w1, const WeightedAutomaton& w2) {
  if (!(w1.alphabet == w2.alphabet)) throw ShapeError("weighted automata alphabets differ");
  const std::size_t n1 = w1.state_count();
  const std::size_t sigma = w1.alphabet.size();

  // Disjoint union, then its lumping quotient; equal blocks for the two
  // initial states already prove equivalence.
  WeightedAutomaton u;
  u.alphabet = w1.alphabet;
  u.q_size = w1.q_size;
  u.transitions = w1.transitions;
  for (std::size_t s = 0; s < sigma; ++s)
    for (const auto& t : w2.transitions[s]) u.transitions[s].push_back({n1 + t.from, n1 + t.to, t.weight});
  u.final = w1.final;
  u.final.insert(u.final.end(), w2.final.begin(), w2.final.end());
  u.state_names.assign(u.final.size(), "");
  const auto block = lumping_partition(u);
  EquivalenceResult result;
  const std::size_t b1 = block[w1.initial], b2 = block[n1 + w2.initial];
  if (b1 == b2) return result;
  const WeightedAutomaton l = quotient(u, block);

  std::map<std::size_t, Sparse> basis;  // pivot -> vector with leading 1 at pivot
  auto reduce = [&](Sparse x) {
    std::size_t pos = 0;
    while (true) {
      auto it = x.lower_bound(pos);
      if (it == x.end()) break;
      pos = it->first;
      auto b = basis.find(pos);
      if (b != basis.end()) {
        const Rational c = it->second;
        for (const auto& [j, bj] : b->second) {
          Rational& xj = x[j];
          xj -= c * bj;
          if (xj == 0) x.erase(j);
        }
      }
      ++pos;
    }
    return x;
  };

  // x_w = (e_b1 - e_b2) μ(w); weight difference of w is x_w · final.
  struct Node {
    Sparse x;
    std::size_t parent;
    Symbol letter;
  };
  std::vector<Node> nodes;
  nodes.push_back({Sparse{{b1, Rational(1)}, {b2, Rational(-1)}}, SIZE_MAX, 0});
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t id = queue.front();
    queue.pop_front();
    Sparse residual = reduce(nodes[id].x);
    if (residual.empty()) continue;
    if (final_weight(l, nodes[id].x) != 0) {
      Symbols word;
      for (std::size_t i = id; nodes[i].parent != SIZE_MAX; i = nodes[i].parent)
        word.push_back(nodes[i].letter);
      std::reverse(word.begin(), word.end());
      result.equivalent = false;
      result.weight1 = weight_of(w1, word);
      result.weight2 = weight_of(w2, word);
      result.witness = std::move(word);
      return result;
    }
    const Rational lead = residual.begin()->second;
    for (auto& [i, v] : residual) v /= lead;
    const std::size_t pivot = residual.begin()->first;
    basis.emplace(pivot, std::move(residual));
    for (Symbol s = 0; s < sigma; ++s) {
      Sparse y = step(l, nodes[id].x, s);
      if (y.empty()) continue;
      nodes.push_back({std::move(y), id, s});
      queue.push_back(nodes.size() - 1);
    }
  }
  return result;
}

bool wa_equivalent(const WeightedAutomaton& w1, const WeightedAutomaton& w2) {
  return wa_compare(w1, w2).equivalent;
}

void export_table(const WeightedAutomaton& w, std::ostream& out) {
  out << "# initial " << w.state_names[w.initial] << "\n# final";
  for (std::size_t i = 0; i < w.state_count(); ++i)
    if (w.final[i]) out << ' ' << w.state_names[i];
  out << '\n';
  for (std::size_t s = 0; s < w.transitions.size(); ++s)
    for (const auto& t : w.transitions[s])
      out << w.state_names[t.from] << '\t' << w.alphabet.token(static_cast<Symbol>(s)) << '\t'
          << w.state_names[t.to] << '\t' << to_string(t.weight) << '\n';
}

}  // namespace sca

namespace sca {

WeightedAutomaton compose(const WeightedAutomaton& a, const WeightedAutomaton& b, const Budget& budget) {
  if (!(a.alphabet == b.alphabet)) throw ShapeError("weighted automata alphabets differ");
  const std::size_t nq = a.q_size;
  using Tr = WeightedAutomaton::Transition;
  auto out_of = [](const WeightedAutomaton& w, std::size_t from, Symbol letter) {
    const auto& ts = w.transitions[letter];
    auto lo = std::lower_bound(ts.begin(), ts.end(), from,
                               [](const Tr& t, std::size_t f) { return t.from < f; });
    auto hi = lo;
    while (hi != ts.end() && hi->from == from) ++hi;
    return std::make_pair(lo, hi);
  };

  WeightedAutomaton c;
  c.alphabet = a.alphabet;
  c.q_size = nq;
  c.transitions.assign(a.alphabet.size(), {});
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
  std::vector<std::pair<std::size_t, std::size_t>> states;
  auto id_of = [&](std::size_t x, std::size_t y) {
    auto [it, fresh] = ids.emplace(std::make_pair(x, y), states.size());
    if (fresh) {
      states.emplace_back(x, y);
      require_within(states.size(), budget.max_states, "composed automaton states");
      c.final.push_back(a.final[x] && b.final[y]);
      c.state_names.push_back("<" + a.state_names[x] + "," + b.state_names[y] + ">");
    }
    return it->second;
  };
  c.initial = id_of(a.initial, b.initial);

  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto [x, y] = states[s];
    std::map<std::pair<Symbol, std::size_t>, Rational> acc;
    auto add = [&](Symbol letter, std::size_t x2, std::size_t y2, const Rational& wt) {
      acc[{letter, id_of(x2, y2)}] += wt;
    };
    if (!a.final[x]) {
      for (Symbol q = 0; q < nq; ++q) {
        auto [lo, hi] = out_of(a, x, q);
        for (auto it = lo; it != hi; ++it) add(q, it->to, y, it->weight);
      }
    } else {
      for (Symbol in = 0; in < nq; ++in)
        for (Symbol mid = 0; mid < nq; ++mid) {
          auto [alo, ahi] = out_of(a, x, pair_letter(nq, in, mid));
          for (auto ia = alo; ia != ahi; ++ia) {
            if (!b.final[y]) {
              auto [blo, bhi] = out_of(b, y, mid);
              for (auto ib = blo; ib != bhi; ++ib) add(in, ia->to, ib->to, ia->weight * ib->weight);
              continue;
            }
            for (Symbol out = 0; out < nq; ++out) {
              auto [blo, bhi] = out_of(b, y, pair_letter(nq, mid, out));
              for (auto ib = blo; ib != bhi; ++ib)
                add(pair_letter(nq, in, out), ia->to, ib->to, ia->weight * ib->weight);
            }
          }
        }
    }
    for (const auto& [key, wt] : acc)
      if (wt != 0) c.transitions[key.first].push_back({s, key.second, wt});
  }
  return c;
}


WeightedAutomaton lump(const WeightedAutomaton& w) { return quotient(w, lumping_partition(w)); }

WeightedAutomaton iterate_automaton(const Sca& a, int t, const Budget& budget) {
  if (t < 1) throw ShapeError("t must be positive");
  const WeightedAutomaton one = lump(is_cfca(a) ? cfca_weighted(a, budget) : weighted_debruijn(a, budget));
  WeightedAutomaton w = one;
  for (int i = 1; i < t; ++i) w = lump(compose(w, one, budget));
  return w;
}

}  // namespace sca

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "sca/core.hpp"
#include "sca/symbolic.hpp"
#include "sca/weighted.hpp"

namespace sca {

namespace {

using Edge = SoficPresentation::Edge;

// Product of a pair graph with itself over equal outputs. Label
// (x1·q + x2)·q + y.
SoficPresentation equal_image_product(const PairPresentation& p) {
  const auto& g = p.graph;
  const std::size_t q = p.q_size, n = g.state_count;
  std::vector<std::vector<std::vector<Edge>>> by_out(n, std::vector<std::vector<Edge>>(q));
  for (const auto& e : g.edges) by_out[e.from][e.label % q].push_back(e);
  SoficPresentation out;
  out.state_count = n * n;
  out.label_count = q * q * q;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t y = 0; y < q; ++y)
        for (const auto& ea : by_out[a][y])
          for (const auto& eb : by_out[b][y])
            out.edges.push_back({a * n + b, ea.to * n + eb.to,
                                 static_cast<Symbol>(((ea.label / q) * q + eb.label / q) * q + y)});
  return trim_essential(out);
}

struct Adjacency {
  std::vector<std::vector<std::size_t>> out, in;  // edge indices
  explicit Adjacency(const SoficPresentation& g) : out(g.state_count), in(g.state_count) {
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      out[g.edges[i].from].push_back(i);
      in[g.edges[i].to].push_back(i);
    }
  }
};

using EdgeOk = std::function<bool(const Edge&)>;

// Walks backward from `start` along allowed edges until a node repeats.
// Returns (cycle, path from the cycle to start), both in forward order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> backward_lasso(
    const SoficPresentation& g, const Adjacency& adj, std::size_t start, const EdgeOk& ok) {
  std::map<std::size_t, std::size_t> seen{{start, 0}};
  std::vector<std::size_t> seq;
  std::size_t cur = start;
  while (true) {
    std::size_t pick = SIZE_MAX;
    for (std::size_t e : adj.in[cur])
      if (ok(g.edges[e])) {
        pick = e;
        break;
      }
    if (pick == SIZE_MAX) throw Error("internal: no backward continuation");
    seq.push_back(pick);
    cur = g.edges[pick].from;
    auto [it, fresh] = seen.emplace(cur, seq.size());
    if (!fresh) {
      const std::size_t i = it->second;
      std::vector<std::size_t> cycle(seq.rbegin(), seq.rend() - static_cast<long>(i));
      std::vector<std::size_t> path(seq.rend() - static_cast<long>(i), seq.rend());
      return {cycle, path};
    }
  }
}

// Forward counterpart: (path from start to the cycle, cycle).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> forward_lasso(
    const SoficPresentation& g, const Adjacency& adj, std::size_t start, const EdgeOk& ok) {
  std::map<std::size_t, std::size_t> seen{{start, 0}};
  std::vector<std::size_t> seq;
  std::size_t cur = start;
  while (true) {
    std::size_t pick = SIZE_MAX;
    for (std::size_t e : adj.out[cur])
      if (ok(g.edges[e])) {
        pick = e;
        break;
      }
    if (pick == SIZE_MAX) throw Error("internal: no forward continuation");
    seq.push_back(pick);
    cur = g.edges[pick].to;
    auto [it, fresh] = seen.emplace(cur, seq.size());
    if (!fresh) {
      const std::size_t i = it->second;
      return {std::vector<std::size_t>(seq.begin(), seq.begin() + static_cast<long>(i)),
              std::vector<std::size_t>(seq.begin() + static_cast<long>(i), seq.end())};
    }
  }
}

// Shortest path (edge list) from any node in `sources` to `target`.
std::vector<std::size_t> path_from_set(const SoficPresentation& g, const Adjacency& adj,
                                       const std::vector<bool>& sources, std::size_t target) {
  std::vector<std::size_t> via(g.state_count, SIZE_MAX);
  std::vector<bool> seen(g.state_count, false);
  std::deque<std::size_t> queue{target};
  seen[target] = true;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    if (sources[s]) {
      std::vector<std::size_t> path;
      for (std::size_t c = s; c != target; c = g.edges[via[c]].to) path.push_back(via[c]);
      return path;
    }
    for (std::size_t e : adj.in[s]) {
      const std::size_t p = g.edges[e].from;
      if (!seen[p]) {
        seen[p] = true;
        via[p] = e;
        queue.push_back(p);
      }
    }
  }
  throw Error("internal: target unreachable");
}

std::vector<std::size_t> path_to_set(const SoficPresentation& g, const Adjacency& adj, std::size_t start,
                                     const std::vector<bool>& targets) {
  std::vector<std::size_t> via(g.state_count, SIZE_MAX);
  std::vector<bool> seen(g.state_count, false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    if (targets[s]) {
      std::vector<std::size_t> path;
      for (std::size_t c = s; c != start; c = g.edges[via[c]].from) path.push_back(via[c]);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (std::size_t e : adj.out[s]) {
      const std::size_t n = g.edges[e].to;
      if (!seen[n]) {
        seen[n] = true;
        via[n] = e;
        queue.push_back(n);
      }
    }
  }
  throw Error("internal: target set unreachable");
}

LassoWitness::Segment segment(const SoficPresentation& g, const std::vector<std::size_t>& edges,
                              std::size_t q) {
  LassoWitness::Segment s;
  for (std::size_t e : edges) {
    const Symbol l = g.edges[e].label;
    s.c1.push_back(static_cast<Symbol>(l / (q * q)));
    s.c2.push_back(static_cast<Symbol>((l / q) % q));
    s.out.push_back(static_cast<Symbol>(l % q));
  }
  return s;
}

bool diagonal(const Edge& e, std::size_t q) { return (e.label / (q * q)) == ((e.label / q) % q); }

// Keeps nodes that have an infinite allowed path backward (`backward`) or
// forward inside the kept set.
std::vector<bool> infinite_core(const SoficPresentation& g, const Adjacency& adj, const EdgeOk& ok,
                                bool backward) {
  std::vector<std::size_t> deg(g.state_count, 0);
  for (const auto& e : g.edges)
    if (ok(e)) ++deg[backward ? e.to : e.from];
  std::vector<bool> keep(g.state_count, true);
  std::deque<std::size_t> dead;
  for (std::size_t i = 0; i < g.state_count; ++i)
    if (deg[i] == 0) {
      keep[i] = false;
      dead.push_back(i);
    }
  while (!dead.empty()) {
    const std::size_t s = dead.front();
    dead.pop_front();
    for (std::size_t e : backward ? adj.out[s] : adj.in[s]) {
      if (!ok(g.edges[e])) continue;
      const std::size_t n = backward ? g.edges[e].to : g.edges[e].from;
      if (keep[n] && --deg[n] == 0) {
        keep[n] = false;
        dead.push_back(n);
      }
    }
  }
  return keep;
}

std::vector<bool> closure(const SoficPresentation& g, const Adjacency& adj, std::vector<bool> set,
                          bool forward) {
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set[i]) queue.push_back(i);
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t e : forward ? adj.out[s] : adj.in[s]) {
      const std::size_t n = forward ? g.edges[e].to : g.edges[e].from;
      if (!set[n]) {
        set[n] = true;
        queue.push_back(n);
      }
    }
  }
  return set;
}

PairWitness pair_witness(const Symbols& labels, std::size_t q, int lag) {
  PairWitness w;
  w.input.offset = lag;
  for (Symbol l : labels) {
    w.input.symbols.push_back(static_cast<Symbol>(l / q));
    w.output.symbols.push_back(static_cast<Symbol>(l % q));
  }
  return w;
}

}  // namespace

NoisyVerdict is_noisy(const Sca& a, const Budget& budget) {
  const auto p = pair_presentation(a, 1, budget);
  NoisyVerdict v;
  if (auto missing = missing_factor(p.graph, budget)) {
    v.answer = false;
    v.witness = pair_witness(*missing, p.q_size, p.lag);
  }
  return v;
}

bool cfca_noisy_local(const Sca& a) {
  const auto ld = local_distribution(a);
  for (const auto& row : ld.table)
    for (const auto& p : row)
      if (p == 0) return false;
  return true;
}

SurjectivityVerdict is_surjective(const Sca& a, const Budget& budget) {
  const auto p = pair_presentation(a, 1, budget);
  const std::size_t q = p.q_size;
  std::vector<Symbol> to_output(q * q);
  for (std::size_t l = 0; l < q * q; ++l) to_output[l] = static_cast<Symbol>(l % q);
  const auto g = bisimulation_quotient(trim_essential(relabel(p.graph, to_output, q)));
  SurjectivityVerdict v;
  if (auto orphan = missing_factor(g, budget)) {
    v.answer = false;
    v.orphan = orphan;
  }
  return v;
}

InjectivityVerdict is_injective(const Sca& a, const Budget& budget) {
  const auto p = pair_presentation(a, 1, budget);
  const std::size_t q = p.q_size;
  require_within(static_cast<std::uint64_t>(p.graph.state_count) * p.graph.state_count, budget.max_states,
                 "equal-image product states");
  const auto g = equal_image_product(p);
  InjectivityVerdict v;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (diagonal(g.edges[i], q)) continue;
    const Adjacency adj(g);
    const EdgeOk any = [](const Edge&) { return true; };
    auto [lcycle, lpath] = backward_lasso(g, adj, g.edges[i].from, any);
    auto [rpath, rcycle] = forward_lasso(g, adj, g.edges[i].to, any);
    std::vector<std::size_t> middle = lpath;
    middle.push_back(i);
    middle.insert(middle.end(), rpath.begin(), rpath.end());
    v.answer = false;
    v.witness = LassoWitness{segment(g, lcycle, q), segment(g, middle, q), segment(g, rcycle, q), p.lag};
    return v;
  }
  return v;
}

InjectivityVerdict is_preinjective(const Sca& a, const Budget& budget) {
  const auto p = pair_presentation(a, 1, budget);
  const std::size_t q = p.q_size;
  require_within(static_cast<std::uint64_t>(p.graph.state_count) * p.graph.state_count, budget.max_states,
                 "equal-image product states");
  const auto g = equal_image_product(p);
  const Adjacency adj(g);
  const EdgeOk diag = [q](const Edge& e) { return diagonal(e, q); };
  const auto left = infinite_core(g, adj, diag, true);
  const auto right = infinite_core(g, adj, diag, false);
  const auto after_left = closure(g, adj, left, true);
  const auto before_right = closure(g, adj, right, false);
  InjectivityVerdict v;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (diagonal(e, q) || !after_left[e.from] || !before_right[e.to]) continue;
    auto lpath = path_from_set(g, adj, left, e.from);
    const std::size_t lstart = lpath.empty() ? e.from : g.edges[lpath.front()].from;
    auto [lcycle, ltail] = backward_lasso(g, adj, lstart, [&](const Edge& x) { return diag(x) && left[x.from]; });
    auto rpath = path_to_set(g, adj, e.to, right);
    const std::size_t rstart = rpath.empty() ? e.to : g.edges[rpath.back()].to;
    auto [rhead, rcycle] = forward_lasso(g, adj, rstart, [&](const Edge& x) { return diag(x) && right[x.to]; });
    std::vector<std::size_t> middle = ltail;
    middle.insert(middle.end(), lpath.begin(), lpath.end());
    middle.push_back(i);
    middle.insert(middle.end(), rpath.begin(), rpath.end());
    middle.insert(middle.end(), rhead.begin(), rhead.end());
    v.answer = false;
    v.witness = LassoWitness{segment(g, lcycle, q), segment(g, middle, q), segment(g, rcycle, q), p.lag};
    return v;
  }
  return v;
}

NdetEqualVerdict ndet_equal(const Sca& a, const Sca& b_in, int t, const Budget& budget) {
  if (t < 1) throw ShapeError("t must be positive");
  const Sca b = align_states(a, b_in);
  auto [x, y] = common_radius(a, b, budget);
  const int k = x.radius();
  const auto pa = pair_presentation_at_radius(x, k, t, budget);
  const auto pb = pair_presentation_at_radius(y, k, t, budget);
  const std::size_t labels = pa.graph.label_count;

  using Subset = std::vector<std::uint32_t>;
  auto successors = [labels](const SoficPresentation& g) {
    std::vector<std::vector<std::vector<std::uint32_t>>> s(g.state_count, std::vector<std::vector<std::uint32_t>>(labels));
    for (const auto& e : g.edges) s[e.from][e.label].push_back(static_cast<std::uint32_t>(e.to));
    return s;
  };
  const auto sa = successors(pa.graph), sb = successors(pb.graph);
  auto full = [](std::size_t n) {
    Subset s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<std::uint32_t>(i);
    return s;
  };
  auto advance = [](const auto& succ, const Subset& from, Symbol l) {
    Subset out;
    for (auto s : from) out.insert(out.end(), succ[s][l].begin(), succ[s][l].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  std::map<std::pair<Subset, Subset>, std::size_t> ids;
  std::vector<std::pair<Subset, Subset>> nodes{{full(pa.graph.state_count), full(pb.graph.state_count)}};
  std::vector<std::pair<std::size_t, Symbol>> parent{{SIZE_MAX, 0}};
  ids.emplace(nodes[0], 0);
  NdetEqualVerdict v;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    for (Symbol l = 0; l < labels; ++l) {
      Subset na = advance(sa, nodes[id].first, l), nb = advance(sb, nodes[id].second, l);
      if (na.empty() && nb.empty()) continue;
      if (na.empty() != nb.empty()) {
        Symbols word{l};
        for (std::size_t i = id; parent[i].first != SIZE_MAX; i = parent[i].first) word.push_back(parent[i].second);
        std::reverse(word.begin(), word.end());
        v.answer = false;
        v.witness = pair_witness(word, pa.q_size, pa.lag);
        v.witness_realized_by_a = nb.empty();
        return v;
      }
      auto key = std::make_pair(std::move(na), std::move(nb));
      if (ids.count(key)) continue;
      require_within(nodes.size() + 1, budget.max_states, "product subset construction");
      ids.emplace(key, nodes.size());
      nodes.push_back(std::move(key));
      parent.emplace_back(id, l);
    }
  }
  return v;
}

PatternVerdict forced_pattern_exists(const Sca& a, const Symbols& u, const Budget& budget) {
  const std::size_t len = u.size() + 2 * static_cast<std::size_t>(a.radius());
  PatternVerdict v;
  if (u.empty()) {
    v.answer = true;
    v.window = Symbols(len, 0);
    return v;
  }
  require_within(checked_pow(a.states().size(), len), budget.max_enum, "pattern window enumeration");
  Symbols w(len, 0);
  do {
    if (window_probability(a, w, u) == 1) {
      v.answer = true;
      v.window = w;
      return v;
    }
  } while (next_word(w, a.states().size()));
  return v;
}

PatternVerdict reachable_pattern_exists(const Sca& a, const Symbols& u, const Budget& budget) {
  const std::size_t len = u.size() + 2 * static_cast<std::size_t>(a.radius());
  PatternVerdict v;
  if (u.empty()) {
    v.answer = true;
    v.window = Symbols(len, 0);
    v.random = Symbols(len, 0);
    return v;
  }
  require_within(checked_pow(a.states().size(), len), budget.max_enum, "pattern window enumeration");
  Symbols w(len, 0);
  do {
    if (window_probability(a, w, u) == 0) continue;
    require_within(checked_pow(a.random().size(), len), budget.max_enum, "random word enumeration");
    Symbols r(len, 0);
    do {
      if (apply_window(a, Word{w, 0}, Word{r, 0}).symbols == u) {
        v.answer = true;
        v.window = w;
        v.random = r;
        return v;
      }
    } while (next_word(r, a.random().size()));
  } while (next_word(w, a.states().size()));
  return v;
}

}  // namespace sca

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "sca/core.hpp"
#include "internal.hpp"

namespace sca {

std::uint64_t LoopWitness::length() const {
  return prefix.size() + anchor.size() + pumps * (loop.size() + anchor.size()) + suffix.size();
}

Symbols LoopWitness::word() const {
  Symbols w = prefix;
  w.insert(w.end(), anchor.begin(), anchor.end());
  for (std::uint64_t i = 0; i < pumps; ++i) {
    w.insert(w.end(), loop.begin(), loop.end());
    w.insert(w.end(), anchor.begin(), anchor.end());
  }
  w.insert(w.end(), suffix.begin(), suffix.end());
  return w;
}

Rational pattern_probability(const Sca& a, const Symbols& v, Symbol x, Symbol y, Symbol z) {
  const std::size_t k = static_cast<std::size_t>(a.radius());
  if (v.size() < 2 * k + 3) throw ShapeError("pattern_probability: window too short for x y z");
  Symbols u(v.size() - 2 * k, y);
  u.front() = x;
  u.back() = z;
  return window_probability(a, v, u);
}

void check_ppt_instance(const Sca& a, Symbol x, Symbol y, Symbol z) {
  const std::size_t nq = a.states().size();
  if (nq < 4) throw ShapeError("PPT needs at least 4 states");
  if (x >= nq || y >= nq || z >= nq) throw ShapeError("PPT pattern state out of range");
  if (x == y || y == z || x == z) throw ShapeError("PPT pattern states must be distinct");
}

namespace {

// Edges of the De Bruijn graph on Q^(2k) are the windows Q^ℓ.
struct DeBruijn {
  std::uint64_t nq, ell, vertices, windows;
  std::uint64_t from(std::uint64_t w) const { return w / nq; }
  std::uint64_t to(std::uint64_t w) const { return w % vertices; }
  Symbol last(std::uint64_t w) const { return static_cast<Symbol>(w % nq); }
  Symbols symbols(std::uint64_t w) const {
    Symbols s(ell);
    word_from_index(w, ell, nq, s.data());
    return s;
  }
};

}  // namespace

PptResult ppt_decide_cfca(const Sca& a, Symbol x, Symbol y, Symbol z, const Threshold& th,
                          const Budget& budget) {
  if (!is_cfca(a)) throw NotCfca();
  check_ppt_instance(a, x, y, z);
  if (th.kind != Threshold::Kind::Exponential)
    throw ShapeError("ppt_decide_cfca needs an exponential threshold");
  const std::uint64_t nq = a.states().size(), k = static_cast<std::uint64_t>(a.radius());
  DeBruijn g{nq, 2 * k + 1, checked_pow(nq, 2 * k), checked_pow(nq, 2 * k + 1)};
  const std::uint64_t short_n = g.vertices + 1;
  require_within(g.windows == UINT64_MAX ? UINT64_MAX : g.windows * (short_n + 1), budget.max_enum,
                 "CFCA PPT De Bruijn search");

  const LocalDistribution ld = local_distribution(a);
  std::vector<Rational> px(g.windows), py(g.windows), pz(g.windows);
  {
    Symbols w(g.ell), v(a.v().size());
    for (std::uint64_t i = 0; i < g.windows; ++i) {
      word_from_index(i, g.ell, nq, w.data());
      for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = w[static_cast<std::size_t>(a.v()[j] + static_cast<int>(k))];
      const auto& dist = ld.at(v);
      px[i] = dist[x];
      py[i] = dist[y];
      pz[i] = dist[z];
    }
  }

  PptResult res;
  auto window_of = [&](const std::vector<std::uint64_t>& edges) {
    Symbols out = g.symbols(edges.front());
    for (std::size_t i = 1; i < edges.size(); ++i) out.push_back(g.last(edges[i]));
    return out;
  };

  // Short words: max-product walks x yⁿ z for n ≤ |Q|^(2k) + 1.
  std::vector<Rational> cur(g.vertices, 0), nxt(g.vertices);
  std::vector<std::vector<std::uint64_t>> pred(short_n + 1, std::vector<std::uint64_t>(g.vertices));
  for (std::uint64_t w = 0; w < g.windows; ++w)
    if (px[w] > cur[g.to(w)]) {
      cur[g.to(w)] = px[w];
      pred[0][g.to(w)] = w;
    }
  for (std::uint64_t n = 1; n <= short_n; ++n) {
    std::fill(nxt.begin(), nxt.end(), Rational(0));
    for (std::uint64_t w = 0; w < g.windows; ++w) {
      if (py[w] == 0 || cur[g.from(w)] == 0) continue;
      Rational p = cur[g.from(w)] * py[w];
      if (p > nxt[g.to(w)]) {
        nxt[g.to(w)] = p;
        pred[n][g.to(w)] = w;
      }
    }
    std::swap(cur, nxt);
    Rational best = 0;
    std::uint64_t best_w = 0;
    for (std::uint64_t w = 0; w < g.windows; ++w) {
      if (pz[w] == 0 || cur[g.from(w)] == 0) continue;
      Rational p = cur[g.from(w)] * pz[w];
      if (p > best) {
        best = p;
        best_w = w;
      }
    }
    Rational bound = th.at(n);
    if (best > bound) {
      std::vector<std::uint64_t> edges{best_w};
      std::uint64_t v = g.from(best_w);
      for (std::uint64_t s = n + 1; s-- > 0;) {
        edges.push_back(pred[s][v]);
        v = g.from(pred[s][v]);
      }
      std::reverse(edges.begin(), edges.end());
      res.answer = true;
      res.witness = PptWitness{window_of(edges), n, best, bound, std::nullopt};
      res.summary = "short word with n=" + std::to_string(n);
      return res;
    }
  }

  // Loops: a y-cycle between an x-edge and a z-edge with linear weight > λ.
  auto closure = [&](std::vector<bool> seen, bool forward) {
    std::deque<std::uint64_t> queue;
    for (std::uint64_t v = 0; v < g.vertices; ++v)
      if (seen[v]) queue.push_back(v);
    std::vector<std::vector<std::uint64_t>> adj(g.vertices);
    for (std::uint64_t w = 0; w < g.windows; ++w)
      if (py[w] > 0) adj[forward ? g.from(w) : g.to(w)].push_back(forward ? g.to(w) : g.from(w));
    while (!queue.empty()) {
      std::uint64_t v = queue.front();
      queue.pop_front();
      for (auto u : adj[v])
        if (!seen[u]) {
          seen[u] = true;
          queue.push_back(u);
        }
    }
    return seen;
  };
  std::vector<bool> x_ends(g.vertices, false), z_starts(g.vertices, false);
  for (std::uint64_t w = 0; w < g.windows; ++w) {
    if (px[w] > 0) x_ends[g.to(w)] = true;
    if (pz[w] > 0) z_starts[g.from(w)] = true;
  }
  const auto fwd = closure(x_ends, true), bwd = closure(z_starts, false);
  std::vector<std::uint64_t> usable;
  std::uint64_t useful = 0;
  for (std::uint64_t v = 0; v < g.vertices; ++v) useful += fwd[v] && bwd[v];
  for (std::uint64_t w = 0; w < g.windows; ++w)
    if (py[w] > 0 && fwd[g.from(w)] && bwd[g.from(w)] && fwd[g.to(w)] && bwd[g.to(w)])
      usable.push_back(w);

  // Multiplicative Bellman-Ford on py/λ from a virtual source.
  std::vector<Rational> dist(g.vertices, 1);
  std::vector<std::int64_t> parent(g.vertices, -1);
  std::int64_t updated = -1;
  for (std::uint64_t round = 0; round <= useful; ++round) {
    updated = -1;
    for (auto w : usable) {
      Rational p = dist[g.from(w)] * py[w] / th.lambda;
      if (p > dist[g.to(w)]) {
        dist[g.to(w)] = p;
        parent[g.to(w)] = static_cast<std::int64_t>(w);
        updated = static_cast<std::int64_t>(g.to(w));
      }
    }
    if (updated < 0) break;
  }
  if (updated < 0) {
    res.summary = "no window with n <= " + std::to_string(short_n) +
                  " exceeds the threshold and no useful loop has linear weight > " +
                  to_string(th.lambda);
    return res;
  }

  std::uint64_t s = static_cast<std::uint64_t>(updated);
  for (std::uint64_t i = 0; i < useful; ++i) s = g.from(static_cast<std::uint64_t>(parent[s]));
  std::vector<std::uint64_t> cycle;
  for (std::uint64_t v = s;;) {
    auto w = static_cast<std::uint64_t>(parent[v]);
    cycle.push_back(w);
    v = g.from(w);
    if (v == s) break;
  }
  std::reverse(cycle.begin(), cycle.end());
  Rational cycle_weight = 1;
  for (auto w : cycle) cycle_weight *= py[w];
  if (cycle_weight <= pow(th.lambda, cycle.size()))
    throw std::logic_error("ppt_decide_cfca: predecessor cycle is not heavy");
  {
    // Repeat short cycles so the block ends with the 2k-cell anchor.
    const std::size_t base = cycle.size();
    while (cycle.size() < 2 * k)
      for (std::size_t i = 0; i < base; ++i) cycle.push_back(cycle[i]);
    cycle_weight = 1;
    for (auto w : cycle) cycle_weight *= py[w];
  }

  // Shortest y-paths x-edge → s and s → z-edge.
  auto bfs = [&](const std::vector<bool>& sources, auto&& is_target) {
    std::vector<std::int64_t> via(g.vertices, -2);
    std::deque<std::uint64_t> queue;
    for (std::uint64_t v = 0; v < g.vertices; ++v)
      if (sources[v]) {
        via[v] = -1;
        queue.push_back(v);
      }
    while (!queue.empty()) {
      std::uint64_t v = queue.front();
      queue.pop_front();
      if (is_target(v)) {
        std::vector<std::uint64_t> path;
        while (via[v] >= 0) {
          path.push_back(static_cast<std::uint64_t>(via[v]));
          v = g.from(static_cast<std::uint64_t>(via[v]));
        }
        std::reverse(path.begin(), path.end());
        return std::make_pair(v, path);
      }
      for (auto w : usable)
        if (g.from(w) == v && via[g.to(w)] == -2) {
          via[g.to(w)] = static_cast<std::int64_t>(w);
          queue.push_back(g.to(w));
        }
    }
    throw std::logic_error("ppt_decide_cfca: loop vertex not connected");
  };
  auto [pre_start, pre_path] = bfs(x_ends, [&](std::uint64_t v) { return v == s; });
  std::vector<bool> only_s(g.vertices, false);
  only_s[s] = true;
  auto [suf_end, suf_path] = bfs(only_s, [&](std::uint64_t v) { return z_starts[v]; });

  std::uint64_t x_edge = 0, z_edge = 0;
  Rational best_x = 0, best_z = 0;
  for (std::uint64_t w = 0; w < g.windows; ++w) {
    if (g.to(w) == pre_start && px[w] > best_x) {
      best_x = px[w];
      x_edge = w;
    }
    if (g.from(w) == suf_end && pz[w] > best_z) {
      best_z = pz[w];
      z_edge = w;
    }
  }

  Rational fixed = best_x * best_z;
  for (auto w : pre_path) fixed *= py[w];
  for (auto w : suf_path) fixed *= py[w];
  const std::uint64_t n_fixed = pre_path.size() + suf_path.size(), len = cycle.size();
  const Rational step_bound = pow(th.lambda, len);
  Rational lhs = fixed, rhs = th.alpha * pow(th.lambda, n_fixed);
  std::uint64_t q = 0;
  do {
    if (++q > budget.max_period) throw ResourceExhausted("ppt_decide_cfca: pump count exceeds budget");
    lhs *= cycle_weight;
    rhs *= step_bound;
  } while (lhs <= rhs);

  std::vector<std::uint64_t> pre_edges{x_edge};
  pre_edges.insert(pre_edges.end(), pre_path.begin(), pre_path.end());
  Symbols head = window_of(pre_edges);
  LoopWitness lw;
  lw.anchor.assign(head.end() - static_cast<std::ptrdiff_t>(2 * k), head.end());
  lw.prefix.assign(head.begin(), head.end() - static_cast<std::ptrdiff_t>(2 * k));
  for (std::size_t i = 0; i + 2 * k < len; ++i) lw.loop.push_back(g.last(cycle[i]));
  for (auto w : suf_path) lw.suffix.push_back(g.last(w));
  lw.suffix.push_back(g.last(z_edge));
  lw.pumps = q;

  PptWitness wit;
  wit.n = n_fixed + q * len;
  wit.probability = lhs;
  wit.threshold = rhs;
  if (lw.length() <= budget.max_period) wit.window = lw.word();
  wit.loop = lw;
  res.answer = true;
  res.witness = wit;
  res.summary = "loop of length " + std::to_string(len) + " with linear weight > " +
                to_string(th.lambda) + ", pumped " + std::to_string(q) + " times";
  return res;
}

}  // namespace sca

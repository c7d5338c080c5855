#include <algorithm>
#include <deque>
#include <map>

#include "sca/symbolic.hpp"
#include "sca/weighted.hpp"

namespace sca {

namespace {

void normalize(SoficPresentation& g) {
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.from, x.label, x.to) < std::tie(y.from, y.label, y.to);
  });
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end(),
                            [](const auto& x, const auto& y) {
                              return x.from == y.from && x.label == y.label && x.to == y.to;
                            }),
                g.edges.end());
}

SoficPresentation induced(const SoficPresentation& g, const std::vector<bool>& keep) {
  std::vector<std::size_t> id(g.state_count, SIZE_MAX);
  SoficPresentation out;
  out.label_count = g.label_count;
  for (std::size_t i = 0; i < g.state_count; ++i)
    if (keep[i]) id[i] = out.state_count++;
  for (const auto& e : g.edges)
    if (keep[e.from] && keep[e.to]) out.edges.push_back({id[e.from], id[e.to], e.label});
  normalize(out);
  return out;
}

}  // namespace

PairPresentation pair_presentation_at_radius(const Sca& a, int k, int t, const Budget& budget) {
  const Sca x = pad_for_automaton(minimize_neighborhoods(a, budget), k, budget);
  const WeightedAutomaton w = iterate_automaton(x, t, budget);
  const std::size_t nq = w.q_size;
  std::vector<std::size_t> id(w.state_count(), SIZE_MAX);
  PairPresentation p;
  p.q_size = nq;
  p.lag = k * t;
  p.graph.label_count = nq * nq;
  for (std::size_t i = 0; i < w.state_count(); ++i)
    if (w.final[i]) id[i] = p.graph.state_count++;
  for (std::size_t s = nq; s < w.transitions.size(); ++s)
    for (const auto& tr : w.transitions[s])
      if (w.final[tr.from] && tr.weight > 0)
        p.graph.edges.push_back({id[tr.from], id[tr.to], static_cast<Symbol>(s - nq)});
  normalize(p.graph);
  p.graph = bisimulation_quotient(trim_essential(p.graph));
  return p;
}

PairPresentation pair_presentation(const Sca& a, int t, const Budget& budget) {
  return pair_presentation_at_radius(a, minimize_neighborhoods(a, budget).radius(), t, budget);
}

SoficPresentation trim_essential(const SoficPresentation& g) {
  std::vector<std::size_t> in(g.state_count, 0), out(g.state_count, 0);
  std::vector<std::vector<std::size_t>> succ(g.state_count), pred(g.state_count);
  for (const auto& e : g.edges) {
    ++out[e.from];
    ++in[e.to];
    succ[e.from].push_back(e.to);
    pred[e.to].push_back(e.from);
  }
  std::vector<bool> keep(g.state_count, true);
  std::deque<std::size_t> dead;
  for (std::size_t i = 0; i < g.state_count; ++i)
    if (in[i] == 0 || out[i] == 0) {
      keep[i] = false;
      dead.push_back(i);
    }
  while (!dead.empty()) {
    const std::size_t s = dead.front();
    dead.pop_front();
    for (std::size_t t : succ[s])
      if (keep[t] && --in[t] == 0) {
        keep[t] = false;
        dead.push_back(t);
      }
    for (std::size_t p : pred[s])
      if (keep[p] && --out[p] == 0) {
        keep[p] = false;
        dead.push_back(p);
      }
  }
  return induced(g, keep);
}

SoficPresentation bisimulation_quotient(const SoficPresentation& g) {
  std::vector<std::size_t> block(g.state_count, 0);
  std::size_t blocks = 1;
  while (true) {
    std::vector<std::vector<std::pair<Symbol, std::size_t>>> sig(g.state_count);
    for (const auto& e : g.edges) sig[e.from].emplace_back(e.label, block[e.to]);
    std::map<std::pair<std::size_t, std::vector<std::pair<Symbol, std::size_t>>>, std::size_t> ids;
    std::vector<std::size_t> next(g.state_count);
    for (std::size_t i = 0; i < g.state_count; ++i) {
      auto& s = sig[i];
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      next[i] = ids.emplace(std::make_pair(block[i], std::move(s)), ids.size()).first->second;
    }
    const bool stable = ids.size() == blocks;
    blocks = ids.size();
    block = std::move(next);
    if (stable) break;
  }
  SoficPresentation out;
  out.label_count = g.label_count;
  out.state_count = g.state_count == 0 ? 0 : blocks;
  for (const auto& e : g.edges) out.edges.push_back({block[e.from], block[e.to], e.label});
  normalize(out);
  return out;
}

SoficPresentation relabel(const SoficPresentation& g, const std::vector<Symbol>& map, std::size_t labels) {
  SoficPresentation out = g;
  out.label_count = labels;
  for (auto& e : out.edges) e.label = map.at(e.label);
  normalize(out);
  return out;
}

std::optional<Symbols> missing_factor(const SoficPresentation& g, const Budget& budget) {
  using Subset = std::vector<std::uint32_t>;
  Subset all(g.state_count);
  for (std::size_t i = 0; i < g.state_count; ++i) all[i] = static_cast<std::uint32_t>(i);
  if (all.empty()) return g.label_count == 0 ? std::nullopt : std::optional<Symbols>(Symbols{0});

  std::vector<std::size_t> first(g.state_count + 1, 0);
  for (const auto& e : g.edges) ++first[e.from + 1];
  for (std::size_t i = 0; i < g.state_count; ++i) first[i + 1] += first[i];

  std::map<Subset, std::size_t> ids{{all, 0}};
  std::vector<const Subset*> subsets{&ids.begin()->first};
  std::vector<std::pair<std::size_t, Symbol>> parent{{SIZE_MAX, 0}};
  std::deque<std::size_t> queue{0};
  std::vector<Subset> next(g.label_count);
  while (!queue.empty()) {
    const std::size_t id = queue.front();
    queue.pop_front();
    for (auto& n : next) n.clear();
    for (std::uint32_t s : *subsets[id])
      for (std::size_t i = first[s]; i < first[s + 1]; ++i)
        next[g.edges[i].label].push_back(static_cast<std::uint32_t>(g.edges[i].to));
    for (Symbol l = 0; l < g.label_count; ++l) {
      auto& n = next[l];
      if (n.empty()) {
        Symbols word{l};
        for (std::size_t i = id; parent[i].first != SIZE_MAX; i = parent[i].first)
          word.push_back(parent[i].second);
        std::reverse(word.begin(), word.end());
        return word;
      }
      std::sort(n.begin(), n.end());
      n.erase(std::unique(n.begin(), n.end()), n.end());
      auto [it, fresh] = ids.emplace(n, subsets.size());
      if (!fresh) continue;
      require_within(subsets.size() + 1, budget.max_states, "subset construction");
      subsets.push_back(&it->first);
      parent.emplace_back(id, l);
      queue.push_back(it->second);
    }
  }
  return std::nullopt;
}

}  // namespace sca

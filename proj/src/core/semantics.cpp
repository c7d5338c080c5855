#include <algorithm>
#include <numeric>
#include <set>

#include "sca/core.hpp"

namespace sca {

namespace {

// Random cells read by outputs [out_lo, out_hi), sorted.
std::vector<long> read_cells(const Sca& a, long out_lo, long out_hi) {
  std::set<long> cells;
  for (long z = out_lo; z < out_hi; ++z)
    for (int vp : a.v_prime()) cells.insert(z + vp);
  return {cells.begin(), cells.end()};
}

// Evaluates outputs [out_lo, out_hi) from input cells starting at in_lo and
// random symbols looked up through `rand_at`.
template <class RandAt>
void eval_layer(const Sca& a, const Symbols& in, long in_lo, long out_lo, long out_hi,
                RandAt&& rand_at, Symbols& out) {
  Symbols q(a.v().size()), r(a.v_prime().size());
  out.resize(static_cast<std::size_t>(out_hi - out_lo));
  for (long z = out_lo; z < out_hi; ++z) {
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = in[static_cast<std::size_t>(z + a.v()[i] - in_lo)];
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rand_at(z + a.v_prime()[i]);
    out[static_cast<std::size_t>(z - out_lo)] = a.apply(q.data(), r.data());
  }
}

void check_window(const Sca& a, const Word& u, int t) {
  if (t < 1) throw ShapeError("t must be positive");
  long need = 2L * a.radius() * t + 1;
  if (static_cast<long>(u.size()) < need)
    throw ShapeError("window too short: need at least " + std::to_string(need) + " cells");
  for (Symbol s : u.symbols)
    if (s >= a.states().size()) throw ShapeError("window symbol outside Q");
}

struct LayerPlan {
  long in_lo, in_hi, out_lo, out_hi;
  std::vector<long> cells;
};

std::vector<LayerPlan> plan_layers(const Sca& a, const Word& u, int t) {
  std::vector<LayerPlan> plan;
  long lo = u.offset, hi = u.offset + static_cast<long>(u.size());
  const long k = a.radius();
  for (int i = 0; i < t; ++i) {
    LayerPlan p{lo, hi, lo + k, hi - k, read_cells(a, lo + k, hi - k)};
    plan.push_back(std::move(p));
    lo += k;
    hi -= k;
  }
  return plan;
}

std::uint64_t enumeration_size(std::size_t radix, std::size_t cells) {
  return checked_pow(radix, cells);
}

}  // namespace

Rational WordDistribution::total() const {
  Rational sum = 0;
  for (const auto& [w, p] : support) sum += p;
  return sum;
}

Rational WordDistribution::at(const Symbols& w) const {
  auto it = support.find(w);
  return it == support.end() ? Rational(0) : it->second;
}

Word apply_window(const Sca& a, const Word& u, const Word& v) {
  if (u.size() != v.size()) throw ShapeError("window and random word lengths differ");
  check_window(a, u, 1);
  for (Symbol s : v.symbols)
    if (s >= a.random().size()) throw ShapeError("random word symbol outside R");
  const long k = a.radius(), lo = u.offset, hi = lo + static_cast<long>(u.size());
  Word out;
  out.offset = lo + k;
  eval_layer(a, u.symbols, lo, lo + k, hi - k,
             [&](long z) { return v.symbols[static_cast<std::size_t>(z - lo)]; }, out.symbols);
  return out;
}

Rational cylinder_prob(const Sca& a, const Word& u, const Word& target, int t,
                       const Budget& budget) {
  check_window(a, u, t);
  const long k = a.radius();
  if (static_cast<long>(target.size()) != static_cast<long>(u.size()) - 2 * k * t)
    throw ShapeError("target length must be |u| - 2kt");
  auto plan = plan_layers(a, u, t);
  std::vector<std::size_t> base;  // first flat index of each layer's cells
  std::size_t total = 0;
  for (const auto& p : plan) {
    base.push_back(total);
    total += p.cells.size();
  }
  const std::size_t nr = a.random().size();
  require_within(enumeration_size(nr, total), budget.max_enum, "random-word enumeration");
  Symbols flat(total, 0), cur, next;
  std::uint64_t hits = 0;
  do {
    cur = u.symbols;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const auto& p = plan[i];
      auto rand_at = [&](long z) {
        auto it = std::lower_bound(p.cells.begin(), p.cells.end(), z);
        return flat[base[i] + static_cast<std::size_t>(it - p.cells.begin())];
      };
      eval_layer(a, cur, p.in_lo, p.out_lo, p.out_hi, rand_at, next);
      std::swap(cur, next);
    }
    if (cur == target.symbols) ++hits;
  } while (next_word(flat, nr));
  return make_rational(Integer(hits), pow(Integer(static_cast<unsigned long>(nr)), total));
}

WordDistribution pushforward_distribution(const Sca& a, const Word& u, int t,
                                          const Budget& budget) {
  check_window(a, u, t);
  auto plan = plan_layers(a, u, t);
  const std::size_t nr = a.random().size();
  std::map<Symbols, Rational> dist{{u.symbols, Rational(1)}};
  std::uint64_t work = 0;
  Symbols next;
  for (const auto& p : plan) {
    std::uint64_t paths = enumeration_size(nr, p.cells.size());
    work = paths == UINT64_MAX || work + paths * dist.size() < work ? UINT64_MAX
                                                                    : work + paths * dist.size();
    require_within(work, budget.max_enum, "random-word enumeration");
    Rational unit = make_rational(1, pow(Integer(static_cast<unsigned long>(nr)), p.cells.size()));
    std::map<Symbols, Rational> out;
    for (const auto& [w, pw] : dist) {
      std::map<Symbols, std::uint64_t> counts;
      Symbols flat(p.cells.size(), 0);
      do {
        auto rand_at = [&](long z) {
          auto it = std::lower_bound(p.cells.begin(), p.cells.end(), z);
          return flat[static_cast<std::size_t>(it - p.cells.begin())];
        };
        eval_layer(a, w, p.in_lo, p.out_lo, p.out_hi, rand_at, next);
        ++counts[next];
      } while (next_word(flat, nr));
      for (const auto& [o, c] : counts) out[o] += pw * unit * Rational(Integer(c));
    }
    dist = std::move(out);
  }
  WordDistribution d;
  d.offset = u.offset + static_cast<long>(a.radius()) * t;
  d.support = std::move(dist);
  return d;
}

Rational window_probability(const Sca& a, const Symbols& v, const Symbols& u) {
  const long k = a.radius(), n = static_cast<long>(v.size());
  if (n < 2 * k + 1 || static_cast<long>(u.size()) != n - 2 * k)
    throw ShapeError("window_probability: need |u| = |v| - 2k >= 1");
  const int vmin = a.v_prime().front(), vmax = a.v_prime().back();
  const std::size_t span = static_cast<std::size_t>(vmax - vmin + 1);
  const std::uint64_t nr = a.random().size();
  const std::uint64_t states = checked_pow(nr, span - 1);
  std::vector<Integer> cur(states, 1), nxt(states);
  Symbols window(span), q(a.v().size()), r(a.v_prime().size());
  for (long z = k; z < n - k; ++z) {
    for (auto& x : nxt) x = 0;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = v[static_cast<std::size_t>(z + a.v()[i])];
    for (std::uint64_t s = 0; s < states; ++s) {
      if (cur[s] == 0) continue;
      word_from_index(s, span - 1, nr, window.data());
      for (Symbol x = 0; x < nr; ++x) {
        window[span - 1] = x;
        for (std::size_t i = 0; i < r.size(); ++i)
          r[i] = window[static_cast<std::size_t>(a.v_prime()[i] - vmin)];
        if (a.apply(q.data(), r.data()) != u[static_cast<std::size_t>(z - k)]) continue;
        nxt[word_index(window.data() + 1, span - 1, nr)] += cur[s];
      }
    }
    std::swap(cur, nxt);
  }
  Integer hits = std::accumulate(cur.begin(), cur.end(), Integer(0));
  unsigned long cells = static_cast<unsigned long>(n - 2 * k) + span - 1;
  return make_rational(hits, pow(Integer(static_cast<unsigned long>(nr)), cells));
}

std::set<Symbols> image_words(const Sca& a, const Word& c, Symbol background,
                              const Budget& budget) {
  const long k = a.radius();
  const long lo = c.offset - k, hi = c.offset + static_cast<long>(c.size()) + k;
  const int vmin = a.v_prime().front(), vmax = a.v_prime().back();
  const std::size_t span = static_cast<std::size_t>(vmax - vmin + 1);
  const std::uint64_t nr = a.random().size();
  auto cell = [&](long z) {
    long i = z - c.offset;
    return i >= 0 && i < static_cast<long>(c.size()) ? c.symbols[static_cast<std::size_t>(i)]
                                                     : background;
  };
  std::uint64_t starts = checked_pow(nr, span - 1);
  require_within(starts, budget.max_enum, "image enumeration");
  std::set<std::pair<std::uint64_t, Symbols>> cur, nxt;
  for (std::uint64_t s = 0; s < starts; ++s) cur.insert({s, {}});
  Symbols window(span), q(a.v().size()), r(a.v_prime().size());
  for (long z = lo; z < hi; ++z) {
    nxt.clear();
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = cell(z + a.v()[i]);
    for (const auto& [s, prefix] : cur) {
      word_from_index(s, span - 1, nr, window.data());
      for (Symbol x = 0; x < nr; ++x) {
        window[span - 1] = x;
        for (std::size_t i = 0; i < r.size(); ++i)
          r[i] = window[static_cast<std::size_t>(a.v_prime()[i] - vmin)];
        Symbols w = prefix;
        w.push_back(a.apply(q.data(), r.data()));
        nxt.insert({word_index(window.data() + 1, span - 1, nr), std::move(w)});
      }
    }
    require_within(nxt.size(), budget.max_enum, "image enumeration");
    std::swap(cur, nxt);
  }
  std::set<Symbols> out;
  for (auto& [s, w] : cur) out.insert(w);
  return out;
}

PeriodicConfig step_periodic(const Sca& a, const PeriodicConfig& c, const PeriodicConfig& s,
                             const Budget& budget) {
  if (c.period.empty() || s.period.empty()) throw ShapeError("periods must be non-empty");
  std::uint64_t len = std::lcm<std::uint64_t>(c.period.size(), s.period.size());
  require_within(len, budget.max_period, "period length");
  PeriodicConfig out;
  out.period.resize(len);
  Symbols q(a.v().size()), r(a.v_prime().size());
  for (long z = 0; z < static_cast<long>(len); ++z) {
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = c.at(z + a.v()[i]);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = s.at(z + a.v_prime()[i]);
    out.period[static_cast<std::size_t>(z)] = a.apply(q.data(), r.data());
  }
  return out;
}

Sca iterate_sca(const Sca& a, int t, const Budget& budget) {
  if (t < 1) throw ShapeError("t must be positive");
  if (t == 1) return a;
  auto sumset = [](const std::vector<int>& x, const std::vector<int>& y) {
    std::set<int> s;
    for (int i : x)
      for (int j : y) s.insert(i + j);
    return std::vector<int>(s.begin(), s.end());
  };
  // positions[i]: cells whose layer-i value is needed (layer t = {0}).
  std::vector<std::vector<int>> positions(static_cast<std::size_t>(t) + 1);
  positions[static_cast<std::size_t>(t)] = {0};
  for (int i = t; i >= 1; --i)
    positions[static_cast<std::size_t>(i - 1)] = sumset(positions[static_cast<std::size_t>(i)], a.v());
  std::set<int> rset;
  for (int i = 1; i <= t; ++i)
    for (int x : sumset(positions[static_cast<std::size_t>(i)], a.v_prime())) rset.insert(x);
  std::vector<int> vt = positions[0], vpt(rset.begin(), rset.end());

  auto index_of = [](const std::vector<int>& xs, int x) {
    return static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  };
  struct Cell {
    std::vector<std::size_t> q_idx, r_idx;
  };
  std::vector<std::vector<Cell>> plan(static_cast<std::size_t>(t) + 1);
  for (int i = 1; i <= t; ++i) {
    const auto& prev = positions[static_cast<std::size_t>(i - 1)];
    for (int p : positions[static_cast<std::size_t>(i)]) {
      Cell c;
      for (int v : a.v()) c.q_idx.push_back(index_of(prev, p + v));
      for (int v : a.v_prime()) c.r_idx.push_back(index_of(vpt, p + v));
      plan[static_cast<std::size_t>(i)].push_back(std::move(c));
    }
  }
  const std::uint64_t nr = a.random().size();
  std::vector<std::uint64_t> digit_div(static_cast<std::size_t>(t) + 1);
  for (int i = 1; i <= t; ++i) digit_div[static_cast<std::size_t>(i)] = checked_pow(nr, static_cast<std::uint64_t>(t - i));
  std::vector<Symbols> vals(static_cast<std::size_t>(t) + 1);
  Symbols q(a.v().size()), r(a.v_prime().size());
  Sca out = Sca::from_rule(
      a.states(), power_alphabet(a.random(), static_cast<std::size_t>(t)), vt, vpt,
      [&](std::span<const Symbol> qw, std::span<const Symbol> rw) {
        vals[0].assign(qw.begin(), qw.end());
        for (std::size_t i = 1; i <= static_cast<std::size_t>(t); ++i) {
          vals[i].resize(plan[i].size());
          for (std::size_t c = 0; c < plan[i].size(); ++c) {
            const auto& cell = plan[i][c];
            for (std::size_t j = 0; j < q.size(); ++j) q[j] = vals[i - 1][cell.q_idx[j]];
            for (std::size_t j = 0; j < r.size(); ++j)
              r[j] = static_cast<Symbol>((rw[cell.r_idx[j]] / digit_div[i]) % nr);
            vals[i][c] = a.apply(q.data(), r.data());
          }
        }
        return vals[static_cast<std::size_t>(t)][0];
      },
      budget);
  if (a.values()) return out.with_values(*a.values());
  return out;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

SpaceTime sample_diagram(const Sca& a, const PeriodicConfig& c, int steps, std::uint64_t seed,
                         bool keep_randomness, const Budget& budget) {
  if (steps < 0) throw ShapeError("steps must be nonnegative");
  Rng rng(seed);
  SpaceTime d;
  d.rows.push_back(c);
  for (int i = 0; i < steps; ++i) {
    PeriodicConfig s;
    s.period.resize(d.rows.back().period.size());
    for (auto& x : s.period) x = static_cast<Symbol>(rng.below(a.random().size()));
    d.rows.push_back(step_periodic(a, d.rows.back(), s, budget));
    if (keep_randomness) d.randomness_rows.push_back(std::move(s));
  }
  return d;
}

Word sample_window(const Sca& a, const Word& u, int t, Rng& rng) {
  Word cur = u;
  for (int i = 0; i < t; ++i) {
    Word v;
    v.offset = cur.offset;
    v.symbols.resize(cur.size());
    for (auto& x : v.symbols) x = static_cast<Symbol>(rng.below(a.random().size()));
    cur = apply_window(a, cur, v);
  }
  return cur;
}

}  // namespace sca

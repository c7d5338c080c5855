#include "sca/sca.hpp"

#include <algorithm>
#include <set>

namespace sca {

namespace {

void check_neighborhood(const std::vector<int>& v, const char* name) {
  if (v.empty()) throw ShapeError(std::string(name) + " is empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] >= v[i]) throw ShapeError(std::string(name) + " must be strictly increasing");
}

int max_abs(const std::vector<int>& v) {
  int k = 0;
  for (int x : v) k = std::max(k, std::abs(x));
  return k;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

// Positions of `sub` inside `super` (both sorted).
std::vector<std::size_t> positions_in(const std::vector<int>& sub, const std::vector<int>& super) {
  std::vector<std::size_t> out;
  for (int x : sub) {
    auto it = std::lower_bound(super.begin(), super.end(), x);
    if (it == super.end() || *it != x) throw ShapeError("neighbourhood is not a superset");
    out.push_back(static_cast<std::size_t>(it - super.begin()));
  }
  return out;
}

}  // namespace

Sca::Sca(Alphabet states, Alphabet random, std::vector<int> v, std::vector<int> v_prime,
         std::vector<Symbol> table, bool cfca_flag)
    : states_(std::move(states)),
      random_(std::move(random)),
      v_(std::move(v)),
      v_prime_(std::move(v_prime)),
      table_(std::move(table)),
      cfca_flag_(cfca_flag) {
  check_neighborhood(v_, "neighborhood");
  check_neighborhood(v_prime_, "random_neighborhood");
  radius_ = std::max(max_abs(v_), max_abs(v_prime_));
  q_words_ = checked_pow(states_.size(), v_.size());
  r_words_ = checked_pow(random_.size(), v_prime_.size());
  if (q_words_ == UINT64_MAX || r_words_ == UINT64_MAX || q_words_ > UINT64_MAX / r_words_ ||
      table_.size() != q_words_ * r_words_)
    throw ShapeError("rule table has the wrong size");
  for (Symbol s : table_)
    if (s >= states_.size()) throw ShapeError("rule output outside the state alphabet");
}

Sca Sca::from_rule(Alphabet states, Alphabet random, std::vector<int> v,
                   std::vector<int> v_prime, const LocalRule& rule, const Budget& budget) {
  check_neighborhood(v, "neighborhood");
  check_neighborhood(v_prime, "random_neighborhood");
  std::uint64_t qw = checked_pow(states.size(), v.size());
  std::uint64_t rw = checked_pow(random.size(), v_prime.size());
  require_within(qw == UINT64_MAX || rw == UINT64_MAX ? UINT64_MAX : qw * rw, budget.max_table,
                 "rule table size");
  std::vector<Symbol> table(qw * rw);
  Symbols q(v.size()), r(v_prime.size());
  for (std::uint64_t qi = 0; qi < qw; ++qi) {
    word_from_index(qi, q.size(), states.size(), q.data());
    for (std::uint64_t ri = 0; ri < rw; ++ri) {
      word_from_index(ri, r.size(), random.size(), r.data());
      table[qi * rw + ri] = rule(q, r);
    }
  }
  bool cfca = v_prime == std::vector<int>{0};
  return Sca(std::move(states), std::move(random), std::move(v), std::move(v_prime),
             std::move(table), cfca);
}

bool Sca::is_canonical() const {
  auto full = range(-radius_, radius_);
  return v_ == full && v_prime_ == full;
}

Symbol Sca::apply(const Symbol* q, const Symbol* r) const {
  return table_[word_index(q, v_.size(), states_.size()) * r_words_ +
                word_index(r, v_prime_.size(), random_.size())];
}

Sca Sca::with_values(std::vector<long> values) const {
  if (values.size() != states_.size()) throw ShapeError("values must cover every state");
  Sca out = *this;
  out.values_ = std::move(values);
  return out;
}

bool Sca::operator==(const Sca& o) const {
  return states_ == o.states_ && random_ == o.random_ && v_ == o.v_ && v_prime_ == o.v_prime_ &&
         table_ == o.table_ && cfca_flag_ == o.cfca_flag_;
}

Sca extend_neighborhoods(const Sca& a, std::vector<int> v, std::vector<int> vp,
                         const Budget& budget) {
  auto qpos = positions_in(a.v(), v);
  auto rpos = positions_in(a.v_prime(), vp);
  Symbols qs(a.v().size()), rs(a.v_prime().size());
  Sca out = Sca::from_rule(
      a.states(), a.random(), std::move(v), std::move(vp),
      [&](std::span<const Symbol> q, std::span<const Symbol> r) {
        for (std::size_t i = 0; i < qpos.size(); ++i) qs[i] = q[qpos[i]];
        for (std::size_t i = 0; i < rpos.size(); ++i) rs[i] = r[rpos[i]];
        return a.apply(qs.data(), rs.data());
      },
      budget);
  Sca kept(out.states(), out.random(), out.v(), out.v_prime(), out.table(), a.cfca_flag());
  if (a.values()) return kept.with_values(*a.values());
  return kept;
}

Sca pad_to_radius(const Sca& a, int k, const Budget& budget) {
  if (k < a.radius()) throw ShapeError("cannot pad below the radius");
  auto full = range(-k, k);
  if (a.v() == full && a.v_prime() == full) return a;
  return extend_neighborhoods(a, full, full, budget);
}

Sca canonicalize(const Sca& a, const Budget& budget) { return pad_to_radius(a, a.radius(), budget); }

Sca minimize_neighborhoods(const Sca& a, const Budget& budget) {
  const std::size_t nq = a.states().size(), nr = a.random().size();
  const std::size_t rv = a.v().size(), rvp = a.v_prime().size();
  // An offset is essential iff changing that single coordinate changes
  // the output for some entry.
  auto essential = [&](bool random_side, std::size_t pos) {
    std::size_t len = random_side ? rvp : rv;
    std::size_t radix = random_side ? nr : nq;
    std::uint64_t stride = checked_pow(radix, len - 1 - pos);
    for (std::uint64_t qi = 0; qi < a.q_words(); ++qi)
      for (std::uint64_t ri = 0; ri < a.r_words(); ++ri) {
        std::uint64_t idx = random_side ? ri : qi;
        if ((idx / stride) % radix != 0) continue;
        Symbol base = a.at(qi, ri);
        for (std::size_t d = 1; d < radix; ++d) {
          std::uint64_t other = idx + d * stride;
          Symbol o = random_side ? a.at(qi, other) : a.at(other, ri);
          if (o != base) return true;
        }
      }
    return false;
  };
  std::vector<int> v, vp;
  for (std::size_t i = 0; i < rv; ++i)
    if (essential(false, i)) v.push_back(a.v()[i]);
  for (std::size_t i = 0; i < rvp; ++i)
    if (essential(true, i)) vp.push_back(a.v_prime()[i]);
  if (v.empty()) v = {0};
  if (vp.empty()) vp = {0};
  if (v == a.v() && vp == a.v_prime()) return a;
  // Evaluate through the original table with inessential coordinates at 0.
  Symbols qs(rv, 0), rs(rvp, 0);
  std::vector<std::ptrdiff_t> qmap(v.size(), -1), rmap(vp.size(), -1);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < rv; ++j)
      if (a.v()[j] == v[i]) qmap[i] = static_cast<std::ptrdiff_t>(j);
  for (std::size_t i = 0; i < vp.size(); ++i)
    for (std::size_t j = 0; j < rvp; ++j)
      if (a.v_prime()[j] == vp[i]) rmap[i] = static_cast<std::ptrdiff_t>(j);
  Sca out = Sca::from_rule(
      a.states(), a.random(), v, vp,
      [&](std::span<const Symbol> q, std::span<const Symbol> r) {
        for (std::size_t i = 0; i < q.size(); ++i)
          if (qmap[i] >= 0) qs[static_cast<std::size_t>(qmap[i])] = q[i];
        for (std::size_t i = 0; i < r.size(); ++i)
          if (rmap[i] >= 0) rs[static_cast<std::size_t>(rmap[i])] = r[i];
        return a.apply(qs.data(), rs.data());
      },
      budget);
  if (a.values()) return out.with_values(*a.values());
  return out;
}

Sca relabel_states(const Sca& a, const Alphabet& order) {
  if (order == a.states()) return a;
  if (order.size() != a.states().size()) throw ShapeError("state alphabets differ");
  std::vector<Symbol> to_new(order.size()), to_old(order.size());
  for (Symbol s = 0; s < a.states().size(); ++s) {
    auto n = order.find(a.states().token(s));
    if (!n) throw ShapeError("state alphabets differ");
    to_new[s] = *n;
    to_old[*n] = s;
  }
  Symbols qs(a.v().size());
  Sca out = Sca::from_rule(order, a.random(), a.v(), a.v_prime(),
                           [&](std::span<const Symbol> q, std::span<const Symbol> r) {
                             for (std::size_t i = 0; i < q.size(); ++i) qs[i] = to_old[q[i]];
                             return to_new[a.apply(qs.data(), r.data())];
                           });
  Sca kept(out.states(), out.random(), out.v(), out.v_prime(), out.table(), a.cfca_flag());
  if (a.values()) {
    std::vector<long> vals(order.size());
    for (Symbol s = 0; s < order.size(); ++s) vals[s] = (*a.values())[to_old[s]];
    return kept.with_values(vals);
  }
  return kept;
}

bool is_deterministic(const Sca& a) {
  for (std::uint64_t qi = 0; qi < a.q_words(); ++qi) {
    Symbol first = a.at(qi, 0);
    for (std::uint64_t ri = 1; ri < a.r_words(); ++ri)
      if (a.at(qi, ri) != first) return false;
  }
  return true;
}

bool is_cfca(const Sca& a) { return a.cfca_flag(); }

const std::vector<Rational>& LocalDistribution::at(const Symbols& u) const {
  if (u.size() != rho) throw ShapeError("neighbourhood word has the wrong length");
  return table.at(word_index(u.data(), u.size(), q_size));
}

LocalDistribution local_distribution(const Sca& a) {
  if (!a.cfca_flag()) throw NotCfca();
  LocalDistribution out;
  out.q_size = a.states().size();
  out.rho = a.v().size();
  out.table.resize(a.q_words());
  for (std::uint64_t qi = 0; qi < a.q_words(); ++qi) {
    std::vector<Integer> counts(a.states().size(), 0);
    for (std::uint64_t ri = 0; ri < a.r_words(); ++ri) counts[a.at(qi, ri)] += 1;
    auto& row = out.table[qi];
    for (const auto& c : counts) row.push_back(make_rational(c, Integer(a.r_words())));
  }
  return out;
}

std::vector<Symbol> deterministic_table(const Sca& a) {
  std::vector<Symbol> out(a.q_words());
  for (std::uint64_t qi = 0; qi < a.q_words(); ++qi) out[qi] = a.at(qi, 0);
  return out;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace sca

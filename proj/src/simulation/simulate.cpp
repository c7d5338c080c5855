#include <algorithm>
#include <map>
#include <set>

#include "sca/simulation.hpp"
#include "sca/symbolic.hpp"
#include "sca/weighted.hpp"

namespace sca {

std::string to_string(SimMode m) {
  switch (m) {
    case SimMode::D: return "D";
    case SimMode::N: return "N";
    case SimMode::S: return "S";
  }
  return "?";
}

SimMode parse_sim_mode(const std::string& text) {
  if (text == "D" || text == "d") return SimMode::D;
  if (text == "N" || text == "n") return SimMode::N;
  if (text == "S" || text == "s") return SimMode::S;
  throw ParseError("mode must be D, N or S");
}

namespace {

bool deterministic_equal(const Sca& a, const Sca& b, const Budget& budget) {
  if (!is_deterministic(a) || !is_deterministic(b)) throw NotDeterministic();
  auto [x, y] = common_radius(a, align_states(a, b), budget);
  return deterministic_table(x) == deterministic_table(y);
}

}  // namespace

SimulationCheck check_simulation(const Sca& a, const Sca& b, const RescaleParams& pa,
                                 const RescaleParams& pb, const Trim& trim, SimMode mode,
                                 const Budget& budget) {
  SimulationCheck out;
  const Sca left = rescale_sca(a, pa, budget);
  Sca right = rescale_sca(b, pb, budget);
  try {
    if (trim.restriction) right = check_restriction(right, *trim.restriction, budget);
    if (trim.projection) right = check_projection(right, *trim.projection, budget);
  } catch (const StabilityError& e) {
    out.detail = e.what();
    return out;
  } catch (const CompatibilityError& e) {
    out.detail = e.what();
    return out;
  }
  switch (mode) {
    case SimMode::S: {
      auto r = stochastic_equal_detail(left, right, 1, true, budget);
      out.holds = r.equal;
      out.decided_by_precheck = r.decided_by_precheck;
      out.detail = r.equal ? "stochastic global functions equal"
                           : r.decided_by_precheck ? "prime-factor precheck: incompatible"
                                                   : "stochastic global functions differ";
      break;
    }
    case SimMode::N: {
      auto r = ndet_equal(left, right, 1, budget);
      out.holds = r.answer;
      out.detail = r.answer ? "non-deterministic global functions equal"
                            : "non-deterministic global functions differ";
      break;
    }
    case SimMode::D:
      out.holds = deterministic_equal(left, right, budget);
      out.detail = out.holds ? "deterministic global functions equal"
                             : "deterministic global functions differ";
      break;
  }
  return out;
}

bool simulates(const Sca& a, const Sca& b, const RescaleParams& pa, const RescaleParams& pb,
               const Trim& trim, SimMode mode, const Budget& budget) {
  return check_simulation(a, b, pa, pb, trim, mode, budget).holds;
}

namespace {

std::vector<RescaleParams> parameter_order(const SearchBounds& bounds) {
  std::vector<long> zs{0};
  for (long z = 1; z <= bounds.max_z; ++z) {
    zs.push_back(-z);
    zs.push_back(z);
  }
  std::vector<RescaleParams> out;
  for (unsigned m = 1; m <= bounds.max_m; ++m)
    for (unsigned t = 1; t <= bounds.max_t; ++t)
      for (long z : zs) out.push_back({m, t, z});
  return out;
}

std::set<std::string> token_set(const Alphabet& a) {
  return {a.tokens().begin(), a.tokens().end()};
}

// Injections Q_a → Q_b in lexicographic order of image tuples.
std::vector<Injection> injections(const Alphabet& sub, std::size_t host, std::uint64_t limit) {
  std::vector<Injection> out;
  const std::size_t n = sub.size();
  if (n > host) return out;
  std::vector<Symbol> img(n);
  std::vector<bool> used(host, false);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (out.size() >= limit) return;
    if (i == n) {
      out.push_back({sub, img});
      return;
    }
    for (Symbol s = 0; s < host; ++s)
      if (!used[s]) {
        used[s] = true;
        img[i] = s;
        rec(i + 1);
        used[s] = false;
      }
  };
  rec(0);
  return out;
}

std::vector<Surjection> surjections(const Alphabet& target, std::size_t from, std::uint64_t limit) {
  std::vector<Surjection> out;
  if (target.size() > from) return out;
  Symbols img(from, 0);
  do {
    std::set<Symbol> hit(img.begin(), img.end());
    if (hit.size() == target.size()) out.push_back({target, img});
  } while (out.size() < limit && next_word(img, target.size()));
  return out;
}

}  // namespace

SearchResult search_simulation(const Sca& a, const Sca& b, const SearchBounds& bounds,
                               SimMode mode, const Budget& budget) {
  SearchResult res;
  if (mode == SimMode::S && !is_deterministic(a)) {
    auto pa = prime_factors(a.random().size()), pb = prime_factors(b.random().size());
    std::vector<std::uint64_t> common;
    std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(common));
    if (common.empty()) {
      res.precheck_short_circuit = true;
      res.detail = "prime-factor precheck: PF(|R_a|) and PF(|R_b|) are disjoint and a is not "
                   "deterministic, so no parameters can work";
      return res;
    }
  }
  const auto params = parameter_order(bounds);
  std::map<std::string, Sca> cache_a, cache_b;
  std::uint64_t skipped = 0;
  auto get = [&](std::map<std::string, Sca>& cache, const Sca& s, const RescaleParams& p) -> const Sca& {
    auto it = cache.find(p.str());
    if (it == cache.end()) it = cache.emplace(p.str(), rescale_sca(s, p, budget)).first;
    return it->second;
  };
  auto attempt = [&](const RescaleParams& pa, const RescaleParams& pb, const Trim& trim) {
    ++res.checked;
    try {
      const Sca& left = get(cache_a, a, pa);
      Sca right = get(cache_b, b, pb);
      if (trim.restriction) right = check_restriction(right, *trim.restriction, budget);
      if (trim.projection) right = check_projection(right, *trim.projection, budget);
      bool ok = false;
      if (mode == SimMode::S) ok = stochastic_equal(left, right, 1, budget);
      if (mode == SimMode::N) ok = ndet_equal(left, right, 1, budget).answer;
      if (mode == SimMode::D) ok = deterministic_equal(left, right, budget);
      if (ok) res.witness = SimulationWitness{pa, pb, trim};
      return ok;
    } catch (const StabilityError&) {
    } catch (const CompatibilityError&) {
    } catch (const NotDeterministic&) {
    } catch (const ResourceExhausted&) {
      ++skipped;
    }
    return false;
  };

  for (int stage = 0; stage < 4; ++stage)
    for (const auto& pa : params)
      for (const auto& pb : params) {
        const Alphabet qa = power_alphabet(a.states(), pa.m), qb = power_alphabet(b.states(), pb.m);
        bool found = false;
        if (stage == 0 && token_set(qa) == token_set(qb)) {
          found = attempt(pa, pb, {});
        } else if (stage == 1 && qa.size() < qb.size()) {
          const auto ta = token_set(qa), tb = token_set(qb);
          if (std::includes(tb.begin(), tb.end(), ta.begin(), ta.end()))
            found = attempt(pa, pb, {injection_by_name(qa, qb), std::nullopt});
        } else if (stage == 2 && qa.size() < qb.size()) {
          for (auto& inj : injections(qa, qb.size(), bounds.max_trims))
            if ((found = attempt(pa, pb, {inj, std::nullopt}))) break;
        } else if (stage == 3 && qa.size() < qb.size()) {
          for (auto& sur : surjections(qa, qb.size(), bounds.max_trims))
            if ((found = attempt(pa, pb, {std::nullopt, sur}))) break;
        }
        if (found) {
          res.detail = "witness found at trim stage " + std::to_string(stage);
          return res;
        }
      }
  res.detail = "no witness within bounds (not a disproof)";
  if (skipped) res.detail += "; " + std::to_string(skipped) + " candidates skipped on budget";
  return res;
}

Host cfca_host(const Sca& a, const Budget& budget) {
  const std::size_t nq = a.states().size(), nr = a.random().size();
  std::vector<std::string> tokens = a.states().tokens();
  const Alphabet pairs = product_alphabet(a.states(), a.random());
  for (const auto& t : pairs.tokens()) {
    if (a.states().find(t)) throw ShapeError("cfca_host: pair token " + t + " clashes with a state");
    tokens.push_back(t);
  }
  std::set<int> vs(a.v().begin(), a.v().end());
  vs.insert(a.v_prime().begin(), a.v_prime().end());
  vs.insert(0);
  const std::vector<int> v(vs.begin(), vs.end());
  auto pos = [&](int x) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  std::vector<std::size_t> qpos, rpos;
  for (int x : a.v()) qpos.push_back(pos(x));
  for (int x : a.v_prime()) rpos.push_back(pos(x));
  const std::size_t centre = pos(0);
  Symbols q(qpos.size()), r(rpos.size());
  Sca host = Sca::from_rule(
      Alphabet(tokens), a.random(), v, {0},
      [&](std::span<const Symbol> w, std::span<const Symbol> s) -> Symbol {
        bool plain = std::all_of(w.begin(), w.end(), [&](Symbol x) { return x < nq; });
        bool pairs = std::all_of(w.begin(), w.end(), [&](Symbol x) { return x >= nq; });
        if (plain) return static_cast<Symbol>(nq + w[centre] * nr + s[0]);
        if (!pairs) return 0;
        for (std::size_t j = 0; j < qpos.size(); ++j) q[j] = static_cast<Symbol>((w[qpos[j]] - nq) / nr);
        for (std::size_t j = 0; j < rpos.size(); ++j) r[j] = static_cast<Symbol>((w[rpos[j]] - nq) % nr);
        return a.apply(q.data(), r.data());
      },
      budget);
  return {host, injection_by_name(a.states(), host.states())};
}

}  // namespace sca

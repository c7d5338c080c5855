#include <algorithm>
#include <set>

#include "sca/ppt_pfa.hpp"

namespace sca {

namespace {

using nlohmann::json;

std::vector<std::string> token_list(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array())
    throw ParseError(std::string("field \"") + key + "\" must be a list of strings");
  std::vector<std::string> out;
  for (const auto& e : doc.at(key)) {
    if (!e.is_string()) throw ParseError(std::string("field \"") + key + "\" must list strings");
    out.push_back(e.get<std::string>());
  }
  if (out.empty()) throw ParseError(std::string("field \"") + key + "\" is empty");
  std::set<std::string> seen(out.begin(), out.end());
  if (seen.size() != out.size()) throw ParseError(std::string("field \"") + key + "\" has duplicates");
  return out;
}

Rational entry(const json& e) {
  if (e.is_string()) return parse_rational(e.get<std::string>());
  if (e.is_number_integer()) return Rational(e.get<long>());
  throw ParseError("matrix entries must be rational strings");
}

// Accepts rows ([[..],[..]]) or a flat row-major list.
std::vector<std::vector<Rational>> matrix(const json& m, std::size_t n) {
  if (!m.is_array()) throw ParseError("matrix must be a list");
  std::vector<Rational> flat;
  if (!m.empty() && m.front().is_array()) {
    if (m.size() != n) throw ParseError("matrix must have one row per state");
    for (const auto& row : m) {
      if (!row.is_array() || row.size() != n) throw ParseError("matrix rows must have one entry per state");
      for (const auto& e : row) flat.push_back(entry(e));
    }
  } else {
    for (const auto& e : m) flat.push_back(entry(e));
  }
  if (flat.size() != n * n) throw ParseError("matrix must have |states|^2 entries");
  std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Rational sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& v = flat[i * n + j];
      if (v < 0 || v > 1) throw ParseError("matrix entries must lie in [0,1]");
      out[i][j] = v;
      sum += v;
    }
    if (sum != 1) throw ParseError("matrix row " + std::to_string(i) + " sums to " + to_string(sum));
  }
  return out;
}

}  // namespace

Pfa parse_pfa(const json& doc) {
  if (!doc.is_object()) throw ParseError("PFA document must be an object");
  Pfa p;
  p.alphabet = Alphabet(token_list(doc, "alphabet"));
  p.states = Alphabet(token_list(doc, "states"));
  if (!doc.contains("initial") || !doc.at("initial").is_string())
    throw ParseError("field \"initial\" must be a state");
  p.initial = p.states.index(doc.at("initial").get<std::string>());
  p.final.assign(p.states.size(), false);
  if (!doc.contains("final") || !doc.at("final").is_array())
    throw ParseError("field \"final\" must be a list of states");
  for (const auto& f : doc.at("final")) {
    if (!f.is_string()) throw ParseError("field \"final\" must list states");
    p.final[p.states.index(f.get<std::string>())] = true;
  }
  if (!doc.contains("matrices") || !doc.at("matrices").is_object())
    throw ParseError("field \"matrices\" must map letters to matrices");
  const auto& ms = doc.at("matrices");
  p.matrices.resize(p.alphabet.size());
  for (Symbol a = 0; a < p.alphabet.size(); ++a) {
    const auto& tok = p.alphabet.token(a);
    if (!ms.contains(tok)) throw ParseError("no matrix for letter " + tok);
    try {
      p.matrices[a] = matrix(ms.at(tok), p.states.size());
    } catch (const ParseError& e) {
      throw ParseError("matrix " + tok + ": " + e.what());
    }
  }
  for (const auto& [k, v] : ms.items()) {
    (void)v;
    if (!p.alphabet.find(k)) throw ParseError("matrix for unknown letter " + k);
  }
  return p;
}

json to_json(const Pfa& p) {
  json doc;
  doc["alphabet"] = p.alphabet.tokens();
  doc["states"] = p.states.tokens();
  doc["initial"] = p.states.token(p.initial);
  json fin = json::array();
  for (Symbol q = 0; q < p.states.size(); ++q)
    if (p.final[q]) fin.push_back(p.states.token(q));
  doc["final"] = fin;
  json ms = json::object();
  for (Symbol a = 0; a < p.alphabet.size(); ++a) {
    json rows = json::array();
    for (const auto& row : p.matrices[a]) {
      json r = json::array();
      for (const auto& v : row) r.push_back(to_string(v));
      rows.push_back(r);
    }
    ms[p.alphabet.token(a)] = rows;
  }
  doc["matrices"] = ms;
  return doc;
}

Rational pfa_accept_prob(const Pfa& p, const Symbols& u) {
  const std::size_t n = p.states.size();
  std::vector<Rational> w(n, 0), nxt(n);
  w[p.initial] = 1;
  for (Symbol a : u) {
    if (a >= p.alphabet.size()) throw ShapeError("pfa_accept_prob: unknown letter");
    std::fill(nxt.begin(), nxt.end(), Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) nxt[j] += w[i] * p.matrices[a][i][j];
    }
    std::swap(w, nxt);
  }
  Rational acc = 0;
  for (std::size_t q = 0; q < n; ++q)
    if (p.final[q]) acc += w[q];
  return acc;
}

Sca encode_pfa(const Pfa& p, const Budget& budget) {
  const std::size_t na = p.alphabet.size(), nq = p.states.size();
  Integer m = 1;
  for (const auto& mat : p.matrices)
    for (const auto& row : mat)
      for (const auto& v : row) m = lcm(m, v.get_den());
  if (!m.fits_ulong_p() || m.get_ui() > budget.max_table)
    throw ResourceExhausted("encode_pfa: common denominator too large");
  const unsigned long mm = m.get_ui();

  // tau[a][q][i] for i in 0..m-1: fill q' in order with m·M_a(q,q') slots.
  std::vector<std::vector<std::vector<Symbol>>> tau(na, std::vector<std::vector<Symbol>>(nq));
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t q = 0; q < nq; ++q)
      for (std::size_t q2 = 0; q2 < nq; ++q2) {
        Rational slots = p.matrices[a][q][q2] * Rational(m);
        tau[a][q].insert(tau[a][q].end(), slots.get_num().get_ui(), static_cast<Symbol>(q2));
      }

  std::vector<std::string> tokens = p.alphabet.tokens();
  for (const auto* t : {&kStart, &kArrow, &kCheck, &kBottom}) {
    if (p.alphabet.find(*t)) throw ShapeError("encode_pfa: PFA alphabet uses reserved token " + *t);
    tokens.push_back(*t);
  }
  Alphabet states(tokens);
  const Symbol start = static_cast<Symbol>(na), arrow = start + 1, check = start + 2,
               bottom = start + 3;

  std::vector<std::string> rtok;
  for (std::size_t q = 0; q < nq; ++q)
    for (unsigned long i = 1; i <= mm; ++i)
      rtok.push_back(tuple_token({p.states.token(static_cast<Symbol>(q)), std::to_string(i)}));
  Alphabet random(rtok);

  auto rule = [&](std::span<const Symbol> c, std::span<const Symbol> s) -> Symbol {
    const Symbol c_prev = c[0], c0 = c[1];
    const std::size_t q_prev = s[0] / mm, i_prev = s[0] % mm, q0 = s[1] / mm;
    if (c0 == start) return start;
    if (c0 < na) {
      std::size_t gamma;
      if (c_prev == start)
        gamma = p.initial;
      else
        gamma = q_prev;
      return tau[c0][gamma][i_prev] == q0 ? arrow : bottom;
    }
    if (c0 == check && p.final[q_prev]) return check;
    return bottom;
  };
  return Sca::from_rule(states, random, {-1, 0}, {-1, 0}, rule, budget);
}

}  // namespace sca

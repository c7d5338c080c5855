#include <map>

#include "sca/sca.hpp"

namespace sca {

namespace {

using nlohmann::json;

std::vector<std::string> string_list(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  const auto& v = doc.at(key);
  if (!v.is_array()) throw ParseError(std::string("field \"") + key + "\" must be a list");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ParseError(std::string("field \"") + key + "\" must list strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<int> int_list(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  const auto& v = doc.at(key);
  if (!v.is_array()) throw ParseError(std::string("field \"") + key + "\" must be a list");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ParseError(std::string("field \"") + key + "\" must list integers");
    out.push_back(e.get<int>());
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw ParseError(std::string("field \"") + key + "\" has duplicates");
  if (out.empty()) throw ParseError(std::string("field \"") + key + "\" is empty");
  return out;
}

template <class F>
auto in_field(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(field + ": " + e.what());
  }
}

std::optional<Symbol> parse_default(const json& doc, const Alphabet& states) {
  if (!doc.contains("default")) return std::nullopt;
  if (!doc.at("default").is_string()) throw ParseError("field \"default\" must be a state string");
  return in_field("default", [&] { return states.index(doc.at("default").get<std::string>()); });
}

std::optional<std::vector<long>> parse_values(const json& doc, const Alphabet& states) {
  if (!doc.contains("values")) return std::nullopt;
  const auto& v = doc.at("values");
  if (!v.is_object()) throw ParseError("field \"values\" must be a mapping");
  std::vector<long> out(states.size(), -1);
  for (const auto& [k, val] : v.items()) {
    Symbol s = in_field("values", [&] { return states.index(k); });
    if (!val.is_number_integer() || val.get<long>() < 0)
      throw ParseError("values[\"" + k + "\"] must be a nonnegative integer");
    out[s] = val.get<long>();
  }
  for (Symbol s = 0; s < out.size(); ++s)
    if (out[s] < 0) throw ParseError("values: missing state \"" + states.token(s) + "\"");
  return out;
}

Sca parse_table(const json& doc, const Budget& budget) {
  Alphabet states(in_field("states", [&] { return Alphabet(string_list(doc, "states")); }));
  Alphabet random(in_field("random", [&] { return Alphabet(string_list(doc, "random")); }));
  auto v = int_list(doc, "neighborhood");
  auto vp = int_list(doc, "random_neighborhood");
  auto def = parse_default(doc, states);
  if (!doc.contains("rule") || !doc.at("rule").is_object())
    throw ParseError("missing mapping \"rule\"");
  std::uint64_t qw = checked_pow(states.size(), v.size());
  std::uint64_t rw = checked_pow(random.size(), vp.size());
  require_within(qw == UINT64_MAX || rw == UINT64_MAX ? UINT64_MAX : qw * rw, budget.max_table,
                 "rule table size");
  constexpr Symbol kUnset = UINT32_MAX;
  std::vector<Symbol> table(qw * rw, def.value_or(kUnset));
  for (const auto& [key, val] : doc.at("rule").items()) {
    std::string field = "rule[\"" + key + "\"]";
    auto bar = key.find('|');
    if (bar == std::string::npos) throw ParseError(field + ": key must have the form \"q...|r...\"");
    Symbols q = in_field(field, [&] { return states.parse(key.substr(0, bar)); });
    Symbols r = in_field(field, [&] { return random.parse(key.substr(bar + 1)); });
    if (q.size() != v.size() || r.size() != vp.size())
      throw ParseError(field + ": expected " + std::to_string(v.size()) + " states and " +
                       std::to_string(vp.size()) + " random symbols");
    if (!val.is_string()) throw ParseError(field + ": value must be a state string");
    Symbol out = in_field(field, [&] { return states.index(val.get<std::string>()); });
    table[word_index(q.data(), q.size(), states.size()) * rw +
          word_index(r.data(), r.size(), random.size())] = out;
  }
  for (std::uint64_t i = 0; i < table.size(); ++i) {
    if (table[i] != kUnset) continue;
    Symbols q(v.size()), r(vp.size());
    word_from_index(i / rw, q.size(), states.size(), q.data());
    word_from_index(i % rw, r.size(), random.size(), r.data());
    throw ParseError("rule not total: missing \"" + states.format(q) + "|" + random.format(r) +
                     "\" and no default");
  }
  bool cfca = vp == std::vector<int>{0};
  Sca out(states, random, v, vp, std::move(table), cfca);
  if (auto values = parse_values(doc, states)) return out.with_values(*values);
  return out;
}

Sca parse_local_distribution(const json& doc, const Budget& budget) {
  Alphabet states(in_field("states", [&] { return Alphabet(string_list(doc, "states")); }));
  auto v = int_list(doc, "neighborhood");
  auto def = parse_default(doc, states);
  const auto& ld = doc.at("local_distribution");
  if (!ld.is_object()) throw ParseError("field \"local_distribution\" must be a mapping");
  std::uint64_t qw = checked_pow(states.size(), v.size());
  require_within(qw, budget.max_table, "neighbourhood count");
  std::vector<std::optional<std::vector<Rational>>> dist(qw);
  Integer m = 1;
  for (const auto& [key, val] : ld.items()) {
    std::string field = "local_distribution[\"" + key + "\"]";
    Symbols q = in_field(field, [&] { return states.parse(key); });
    if (q.size() != v.size())
      throw ParseError(field + ": expected " + std::to_string(v.size()) + " states");
    if (!val.is_object()) throw ParseError(field + ": must map states to rationals");
    std::vector<Rational> row(states.size(), 0);
    Rational sum = 0;
    for (const auto& [s, p] : val.items()) {
      Symbol sym = in_field(field, [&] { return states.index(s); });
      if (!p.is_string()) throw ParseError(field + ": probabilities are \"p/q\" strings");
      Rational r = in_field(field, [&] { return parse_rational(p.get<std::string>()); });
      if (r < 0 || r > 1) throw ParseError(field + ": probability outside [0,1]");
      row[sym] = r;
      sum += r;
      m = lcm(m, r.get_den());
    }
    if (sum != 1) throw ParseError(field + ": probabilities sum to " + to_string(sum));
    dist[word_index(q.data(), q.size(), states.size())] = std::move(row);
  }
  for (std::uint64_t i = 0; i < qw; ++i) {
    if (dist[i]) continue;
    if (!def) {
      Symbols q(v.size());
      word_from_index(i, q.size(), states.size(), q.data());
      throw ParseError("local_distribution not total: missing \"" + states.format(q) +
                       "\" and no default");
    }
    std::vector<Rational> row(states.size(), 0);
    row[*def] = 1;
    dist[i] = std::move(row);
  }
  require_within(m.fits_ulong_p() ? m.get_ui() : UINT64_MAX, budget.max_table,
                 "compiled random alphabet");
  std::uint64_t msize = m.get_ui();
  std::vector<std::string> rtokens;
  for (std::uint64_t i = 0; i < msize; ++i) rtokens.push_back(std::to_string(i));
  require_within(qw * msize, budget.max_table, "rule table size");
  // Random symbol r selects the state whose cumulative interval holds r.
  std::vector<Symbol> table(qw * msize);
  for (std::uint64_t qi = 0; qi < qw; ++qi) {
    std::uint64_t r = 0;
    for (Symbol s = 0; s < states.size(); ++s) {
      Rational count = (*dist[qi])[s] * Rational(m);
      for (std::uint64_t c = 0; c < count.get_num().get_ui(); ++c) table[qi * msize + r++] = s;
    }
  }
  Sca out(states, Alphabet(rtokens), v, {0}, std::move(table), true);
  if (auto values = parse_values(doc, states)) return out.with_values(*values);
  return out;
}

}  // namespace

Sca parse_sca(const json& doc, const Budget& budget) {
  if (!doc.is_object()) throw ParseError("SCA document must be a JSON object");
  if (doc.contains("local_distribution")) return parse_local_distribution(doc, budget);
  return parse_table(doc, budget);
}

Sca parse_sca_text(const std::string& text, const Budget& budget) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  return parse_sca(doc, budget);
}

json to_json(const Sca& a) {
  json doc;
  doc["states"] = a.states().tokens();
  doc["random"] = a.random().tokens();
  doc["neighborhood"] = a.v();
  doc["random_neighborhood"] = a.v_prime();
  std::vector<std::uint64_t> freq(a.states().size(), 0);
  for (Symbol s : a.table()) ++freq[s];
  Symbol def = static_cast<Symbol>(std::max_element(freq.begin(), freq.end()) - freq.begin());
  doc["default"] = a.states().token(def);
  json rule = json::object();
  Symbols q(a.v().size()), r(a.v_prime().size());
  for (std::uint64_t qi = 0; qi < a.q_words(); ++qi) {
    word_from_index(qi, q.size(), a.states().size(), q.data());
    for (std::uint64_t ri = 0; ri < a.r_words(); ++ri) {
      Symbol out = a.at(qi, ri);
      if (out == def) continue;
      word_from_index(ri, r.size(), a.random().size(), r.data());
      rule[a.states().format(q) + "|" + a.random().format(r)] = a.states().token(out);
    }
  }
  doc["rule"] = std::move(rule);
  if (a.values()) {
    json values = json::object();
    for (Symbol s = 0; s < a.states().size(); ++s) values[a.states().token(s)] = (*a.values())[s];
    doc["values"] = std::move(values);
  }
  return doc;
}

}  // namespace sca

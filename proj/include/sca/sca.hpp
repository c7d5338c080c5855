#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "sca/errors.hpp"
#include "sca/rational.hpp"
#include "sca/word.hpp"

namespace sca {

// Stochastic cellular automaton (Q, R, V, V', f) with a total rule table.
//
// The table is indexed by (Q-word over V, R-word over V'), both in
// mixed-radix order with the leftmost offset most significant.
class Sca {
 public:
  using LocalRule = std::function<Symbol(std::span<const Symbol> q, std::span<const Symbol> r)>;

  Sca(Alphabet states, Alphabet random, std::vector<int> v, std::vector<int> v_prime,
      std::vector<Symbol> table, bool cfca_flag);

  // Tabulates `rule`; cfca_flag is set from V' == {0}.
  static Sca from_rule(Alphabet states, Alphabet random, std::vector<int> v,
                       std::vector<int> v_prime, const LocalRule& rule,
                       const Budget& budget = {});

  const Alphabet& states() const { return states_; }
  const Alphabet& random() const { return random_; }
  const std::vector<int>& v() const { return v_; }
  const std::vector<int>& v_prime() const { return v_prime_; }
  const std::vector<Symbol>& table() const { return table_; }
  bool cfca_flag() const { return cfca_flag_; }
  int radius() const { return radius_; }
  bool is_canonical() const;

  std::uint64_t q_words() const { return q_words_; }
  std::uint64_t r_words() const { return r_words_; }

  Symbol apply(const Symbol* q, const Symbol* r) const;
  Symbol apply(std::span<const Symbol> q, std::span<const Symbol> r) const {
    return apply(q.data(), r.data());
  }
  Symbol at(std::uint64_t q_index, std::uint64_t r_index) const {
    return table_[q_index * r_words_ + r_index];
  }

  // Integer value per state for conservation checks, if declared.
  const std::optional<std::vector<long>>& values() const { return values_; }
  Sca with_values(std::vector<long> values) const;

  bool operator==(const Sca& o) const;

 private:
  Alphabet states_;
  Alphabet random_;
  std::vector<int> v_;
  std::vector<int> v_prime_;
  std::vector<Symbol> table_;
  bool cfca_flag_ = false;
  int radius_ = 0;
  std::uint64_t q_words_ = 1;
  std::uint64_t r_words_ = 1;
  std::optional<std::vector<long>> values_;
};

// --- documents -------------------------------------------------------------

Sca parse_sca(const nlohmann::json& doc, const Budget& budget = {});
Sca parse_sca_text(const std::string& text, const Budget& budget = {});
nlohmann::json to_json(const Sca& a);

// --- structural operations -------------------------------------------------

// Pads both neighbourhoods to {-k..k}; cfca_flag is kept.
Sca canonicalize(const Sca& a, const Budget& budget = {});
// Pads both neighbourhoods to {-k..k} for a given k >= radius.
Sca pad_to_radius(const Sca& a, int k, const Budget& budget = {});
// Re-tabulates on supersets v ⊇ a.v(), vp ⊇ a.v_prime(); cfca_flag is kept.
Sca extend_neighborhoods(const Sca& a, std::vector<int> v, std::vector<int> vp,
                         const Budget& budget = {});
// Drops offsets the rule does not depend on (keeping at least one offset
// per neighbourhood). Same explicit global function.
Sca minimize_neighborhoods(const Sca& a, const Budget& budget = {});
// Reorders the state alphabet of `a` to `order` (same token set).
Sca relabel_states(const Sca& a, const Alphabet& order);

bool is_deterministic(const Sca& a);
bool is_cfca(const Sca& a);

// Per-neighbourhood output distribution (index: Q-word over V).
struct LocalDistribution {
  std::size_t q_size = 0;
  std::size_t rho = 0;
  std::vector<std::vector<Rational>> table;  // [q-word index][symbol]

  const std::vector<Rational>& at(const Symbols& u) const;
};

// Throws NotCfca unless cfca_flag.
LocalDistribution local_distribution(const Sca& a);

// Deterministic map of a (rule with every random symbol set to the first
// random symbol) as a table over Q-words.
std::vector<Symbol> deterministic_table(const Sca& a);

// Primes dividing n, ascending.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

}  // namespace sca

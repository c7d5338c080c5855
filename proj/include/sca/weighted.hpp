#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sca/sca.hpp"

namespace sca {

// Finite automaton over Σ = Q ∪ (Q×Q) with rational weights.
//
// Letter ids: q < |Q| for a Q letter, |Q| + a·|Q| + b for the pair (a, b).
struct WeightedAutomaton {
  struct Transition {
    std::size_t from;
    std::size_t to;
    Rational weight;
  };

  Alphabet alphabet;
  std::size_t q_size = 0;
  std::vector<std::string> state_names;
  std::size_t initial = 0;
  std::vector<std::vector<Transition>> transitions;  // per letter, sorted by `from`
  std::vector<bool> final;

  std::size_t state_count() const { return final.size(); }
  std::size_t transition_count() const;
};

// Σ-letter ids.
Symbol pair_letter(std::size_t q_size, Symbol in, Symbol out);
Alphabet sigma_alphabet(const Alphabet& states);

// Q^{ℓ-1} prologue followed by (input, output) pairs.
struct PairWord {
  Symbols prologue;
  std::vector<std::pair<Symbol, Symbol>> body;
};

// v = prologue · inputs, with |v| = |u| + ℓ - 1 and u aligned under the
// centre of each length-ℓ window.
PairWord encode_pair_word(const Symbols& v, const Symbols& u, std::size_t ell);
Symbols to_letters(const PairWord& m, std::size_t q_size);

// Pads V to {-k..k}; V' too unless a is a CFCA (then V' stays {0}).
Sca pad_for_automaton(const Sca& a, int k, const Budget& budget = {});

// Weighted De Bruijn automaton over the canonical form of `a`: states are
// pairs (Q^j, R^j), j < ℓ, every weight 1/|R|.
WeightedAutomaton weighted_debruijn(const Sca& a, const Budget& budget = {});

// Deterministic weighted automaton of a CFCA: states Q^j, j < ℓ, body
// weights read from the local distribution. Throws NotCfca.
WeightedAutomaton cfca_weighted(const Sca& a, const Budget& budget = {});

// Sparse row vector over states.
using WeightVector = std::map<std::size_t, Rational>;

WeightVector initial_vector(const WeightedAutomaton& w);
WeightVector step(const WeightedAutomaton& w, const WeightVector& x, Symbol letter);
Rational final_weight(const WeightedAutomaton& w, const WeightVector& x);

// Automaton of the two-step process "a then b": b reads a's outputs, which
// are summed out. Both must be prologue-shaped (final iff the prologue is
// complete). Only reachable state pairs are built.
WeightedAutomaton compose(const WeightedAutomaton& a, const WeightedAutomaton& b,
                          const Budget& budget = {});

// Quotient by the coarsest partition where finality agrees and every state
// of a block sends the same total weight per letter into each block.
// Preserves every word weight.
WeightedAutomaton lump(const WeightedAutomaton& w);

// Automaton of F^t, by composing t copies of the one-step automaton.
WeightedAutomaton iterate_automaton(const Sca& a, int t, const Budget& budget = {});

Rational weight_of(const WeightedAutomaton& w, const Symbols& letters);
Rational weight_of(const WeightedAutomaton& w, const PairWord& m);

struct EquivalenceResult {
  bool equivalent = true;
  std::optional<Symbols> witness;  // shortest-first word with differing weights
  Rational weight1;
  Rational weight2;
};

// Exact equivalence by growing an echelon basis of reachable difference
// vectors. Throws ShapeError on alphabet mismatch.
EquivalenceResult wa_compare(const WeightedAutomaton& w1, const WeightedAutomaton& w2);
bool wa_equivalent(const WeightedAutomaton& w1, const WeightedAutomaton& w2);

// (state, letter, state, "p/q") rows.
void export_table(const WeightedAutomaton& w, std::ostream& out);

enum class Precheck { Incompatible, Compatible, SomeDeterministic };
std::string to_string(Precheck p);

Precheck prime_factor_precheck(const Sca& a, const Sca& b);

struct EqualityResult {
  bool equal = true;
  Precheck precheck = Precheck::Compatible;
  bool decided_by_precheck = false;
  std::optional<PairWord> witness;
  Rational prob_a;
  Rational prob_b;
  int radius = 0;  // common radius the automata were built at
};

// Same state token set required (reordered if needed); throws ShapeError
// otherwise.
EqualityResult stochastic_equal_detail(const Sca& a, const Sca& b, int t,
                                       bool use_precheck = true, const Budget& budget = {});
bool stochastic_equal(const Sca& a, const Sca& b, int t, const Budget& budget = {});

// b with its states reordered to match a; throws ShapeError if the token
// sets differ.
Sca align_states(const Sca& a, const Sca& b);

// a and b with minimized neighbourhoods, padded to a common radius.
std::pair<Sca, Sca> common_radius(const Sca& a, const Sca& b, const Budget& budget = {});

}  // namespace sca

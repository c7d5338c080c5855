#pragma once

#include <optional>
#include <vector>

#include "sca/sca.hpp"

namespace sca {

// Labeled graph presenting a sofic shift; every state is initial and final.
struct SoficPresentation {
  struct Edge {
    std::size_t from;
    std::size_t to;
    Symbol label;
  };
  std::size_t label_count = 0;
  std::size_t state_count = 0;
  std::vector<Edge> edges;  // sorted by (from, label, to)
};

// Pair shift of F^t: label (x, y) = pair_letter(x, y) - |Q| places input x
// at z + kt above output y at z, with k the common (minimized) radius.
struct PairPresentation {
  SoficPresentation graph;
  std::size_t q_size = 0;
  int lag = 0;  // kt
};

PairPresentation pair_presentation(const Sca& a, int t = 1, const Budget& budget = {});
PairPresentation pair_presentation_at_radius(const Sca& a, int k, int t, const Budget& budget = {});

// Drops states not on a bi-infinite path.
SoficPresentation trim_essential(const SoficPresentation& g);
// Forward-bisimulation quotient; presents the same shift.
SoficPresentation bisimulation_quotient(const SoficPresentation& g);
SoficPresentation relabel(const SoficPresentation& g, const std::vector<Symbol>& map, std::size_t labels);

// Shortest word outside the factor language, if any; subset construction
// from the set of all states.
std::optional<Symbols> missing_factor(const SoficPresentation& g, const Budget& budget = {});

// Input word at offset `lag`, output word at offset 0.
struct PairWitness {
  Word input;
  Word output;
};

// Two bi-infinite inputs ...L L M R R... with a common image; `out` is the
// image cell `lag` to the left of each input cell.
struct LassoWitness {
  struct Segment {
    Symbols c1;
    Symbols c2;
    Symbols out;
  };
  Segment left;
  Segment middle;
  Segment right;
  int lag = 0;
};

struct NoisyVerdict {
  bool answer = true;
  std::optional<PairWitness> witness;
};
struct SurjectivityVerdict {
  bool answer = true;
  std::optional<Symbols> orphan;  // Garden-of-Eden word
};
struct InjectivityVerdict {
  bool answer = true;
  std::optional<LassoWitness> witness;
};
struct NdetEqualVerdict {
  bool answer = true;
  std::optional<PairWitness> witness;
  bool witness_realized_by_a = false;  // the witness pair is reachable for a only
};
struct PatternVerdict {
  bool answer = false;
  std::optional<Symbols> window;  // input of length |u| + 2k
  std::optional<Symbols> random;  // reachable_pattern_exists only
};

NoisyVerdict is_noisy(const Sca& a, const Budget& budget = {});
bool cfca_noisy_local(const Sca& a);
SurjectivityVerdict is_surjective(const Sca& a, const Budget& budget = {});
InjectivityVerdict is_injective(const Sca& a, const Budget& budget = {});
InjectivityVerdict is_preinjective(const Sca& a, const Budget& budget = {});
NdetEqualVerdict ndet_equal(const Sca& a, const Sca& b, int t, const Budget& budget = {});
PatternVerdict forced_pattern_exists(const Sca& a, const Symbols& u, const Budget& budget = {});
PatternVerdict reachable_pattern_exists(const Sca& a, const Symbols& u, const Budget& budget = {});

}  // namespace sca

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sca/sca.hpp"

namespace sca {

// Distribution over output words sharing one offset and length.
struct WordDistribution {
  long offset = 0;
  std::map<Symbols, Rational> support;

  Rational total() const;
  Rational at(const Symbols& w) const;
};

// One step on a finite window: |u| = |v| >= 2k+1, output u.offset + k.
Word apply_window(const Sca& a, const Word& u, const Word& v);

// Exact Pr{F^t(u) = target} by exhaustive enumeration of every random
// cell read by the t layers.
Rational cylinder_prob(const Sca& a, const Word& u, const Word& target, int t,
                       const Budget& budget = {});

// Complete distribution of F^t(u) over Q^(|u|-2kt), layer by layer.
WordDistribution pushforward_distribution(const Sca& a, const Word& u, int t,
                                          const Budget& budget = {});

// One-step Pr{F(v) = u} by a transfer product over random windows; linear
// in |v|. Used where enumeration would be exponential.
Rational window_probability(const Sca& a, const Symbols& v, const Symbols& u);

// All one-step images of the finite configuration `c` embedded in
// `background`; images cover [c.offset - k, c.offset + |c| + k).
std::set<Symbols> image_words(const Sca& a, const Word& c, Symbol background,
                              const Budget& budget = {});

PeriodicConfig step_periodic(const Sca& a, const PeriodicConfig& c, const PeriodicConfig& s,
                             const Budget& budget = {});

// F^t as an SCA over R^t. Neighbourhoods are the tight ones
// (t-fold sum of V; union of layer reads for V'), within {-kt..kt}.
Sca iterate_sca(const Sca& a, int t, const Budget& budget = {});

// Seeded generator; draws are bit-reproducible for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, n) by rejection sampling.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

struct SpaceTime {
  std::vector<PeriodicConfig> rows;
  std::vector<PeriodicConfig> randomness_rows;  // empty unless retained
};

SpaceTime sample_diagram(const Sca& a, const PeriodicConfig& c, int steps, std::uint64_t seed,
                         bool keep_randomness = false, const Budget& budget = {});

// One sample of F^t(u) on a window.
Word sample_window(const Sca& a, const Word& u, int t, Rng& rng);

struct ConservationVerdict {
  bool conserving = true;
  // Populated on violation.
  Word input;
  Word output;
  long input_sum = 0;
  long output_sum = 0;
  std::optional<Word> other_output;  // a second reachable output with another sum
  std::string reason;
};

// Every configuration whose non-background cells fit in a window of
// length `support_bound`, every t-layer random assignment.
ConservationVerdict conservation_check(const Sca& a, int support_bound, int t,
                                       const Budget& budget = {});

// State values: declared `values`, else integer tokens. Throws ShapeError.
std::vector<long> state_values(const Sca& a);

}  // namespace sca

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sca/sca.hpp"

namespace sca {

// Probabilistic finite automaton with row-stochastic rational matrices.
struct Pfa {
  Alphabet alphabet;
  Alphabet states;
  Symbol initial = 0;
  std::vector<bool> final;
  std::vector<std::vector<std::vector<Rational>>> matrices;  // [letter][from][to]
};

// The empty word is accepted with probability 1 iff the initial state is
// final.
inline constexpr bool kEmptyWordAcceptedIffInitialFinal = true;

Pfa parse_pfa(const nlohmann::json& doc);
nlohmann::json to_json(const Pfa& p);

Rational pfa_accept_prob(const Pfa& p, const Symbols& u);

// Tokens of the encoded state alphabet beyond the PFA letters.
inline const std::string kStart = "↦";
inline const std::string kArrow = "→";
inline const std::string kCheck = "✓";
inline const std::string kBottom = "⊥";

// SCA with states A ⊔ {↦, →, ✓, ⊥}, random symbols Q_pfa × {1..m}, V = V' =
// {-1, 0}; one step prints ↦→ⁿ✓ above ↦u✓ with probability P(u)/|Q_pfa|ⁿ.
Sca encode_pfa(const Pfa& p, const Budget& budget = {});

// ϑ(n) = α·λⁿ or θ + c/(n+1)^d.
struct Threshold {
  enum class Kind { Exponential, Superexponential };
  Kind kind = Kind::Exponential;
  Rational alpha, lambda;
  Rational theta, c;
  unsigned d = 1;

  static Threshold exponential(Rational alpha, Rational lambda);
  static Threshold superexponential(Rational theta, Rational c, unsigned d);
  // "exp:alpha,lambda" or "sup:theta,c,d".
  static Threshold parse(const std::string& text);
  Rational at(std::uint64_t n) const;
  std::string describe() const;
};

// Pumped form γ·a·(l·a)^q·γ′ of a YES window; a has 2k cells.
struct LoopWitness {
  Symbols prefix, anchor, loop, suffix;
  std::uint64_t pumps = 0;

  std::uint64_t length() const;
  Symbols word() const;
};

// The window maps to x yⁿ z with `probability` > `threshold` = ϑ(n). The
// window is left empty when the pumped word exceeds Budget::max_period.
struct PptWitness {
  Symbols window;
  std::uint64_t n = 0;
  Rational probability;
  Rational threshold;
  std::optional<LoopWitness> loop;
};

struct PptResult {
  bool answer = false;
  std::optional<PptWitness> witness;
  std::string summary;
  std::optional<std::uint64_t> k_bound;  // K of the superexponential procedure
};

// Throws NotCfca, ShapeError (|Q| < 4, x,y,z not distinct, wrong threshold
// kind), ResourceExhausted.
PptResult ppt_decide_cfca(const Sca& a, Symbol x, Symbol y, Symbol z, const Threshold& th,
                          const Budget& budget = {});
PptResult ppt_decide_sca(const Sca& a, Symbol x, Symbol y, Symbol z, const Threshold& th,
                         const Budget& budget = {});

// K such that ϑ(m) > μ^m for every m > K, μ = (1 - |R|^-ℓ)^(1/(ℓ(ℓ+|Q|^ℓ))).
std::uint64_t superexponential_bound(std::size_t q_size, std::size_t r_size, int ell,
                                     const Threshold& th, const Budget& budget = {});

// Probability that the window v (|v| = n + 2 + 2k) maps to x yⁿ z.
Rational pattern_probability(const Sca& a, const Symbols& v, Symbol x, Symbol y, Symbol z);

}  // namespace sca

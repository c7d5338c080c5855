#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sca/sca.hpp"

namespace sca {

// ⟨m, t, z⟩: pack m cells, iterate t steps, shift by z.
struct RescaleParams {
  unsigned m = 1;
  unsigned t = 1;
  long z = 0;

  static RescaleParams parse(const std::string& text);  // "m,t,z"
  std::string str() const;
  bool operator==(const RescaleParams&) const = default;
};

// Blocks of m symbols over `radix` become single symbols over radix^m.
Symbols pack_word(const Symbols& w, std::size_t m, std::size_t radix);
Symbols unpack_word(const Symbols& w, std::size_t m, std::size_t radix);

// States Q^m, random symbols (R^m)^t; explicit global function
// b_m ∘ σ_z ∘ F^t ∘ b_m^-1.
Sca rescale_sca(const Sca& a, const RescaleParams& p, const Budget& budget = {});

// i: Q' → Q, given as the image of each token of `source`.
struct Injection {
  Alphabet source;
  std::vector<Symbol> image;
};

// π: Q → Q'', given as the image of each state of the SCA.
struct Surjection {
  Alphabet target;
  std::vector<Symbol> image;
};

// Maps every token of `sub` to the state of `host` with the same token.
Injection injection_by_name(const Alphabet& sub, const Alphabet& host);

class StabilityError : public Error {
 public:
  StabilityError(std::string what, Symbols neighborhood, Symbols random)
      : Error(std::move(what)), neighborhood(std::move(neighborhood)), random(std::move(random)) {}
  Symbols neighborhood;  // over Q', at V
  Symbols random;        // at V'
};

class CompatibilityError : public Error {
 public:
  CompatibilityError(std::string what, Symbols first, Symbols second, Symbols random)
      : Error(std::move(what)), first(std::move(first)), second(std::move(second)),
        random(std::move(random)) {}
  Symbols first, second;  // neighbourhoods over Q with equal projections
  Symbols random;
};

// Restriction of a to i(Q'); throws StabilityError.
Sca check_restriction(const Sca& a, const Injection& i, const Budget& budget = {});
// Projection of a along π; throws CompatibilityError.
Sca check_projection(const Sca& a, const Surjection& pi, const Budget& budget = {});

enum class SimMode { D, N, S };
std::string to_string(SimMode m);
SimMode parse_sim_mode(const std::string& text);

// Restriction first, then projection.
struct Trim {
  std::optional<Injection> restriction;
  std::optional<Surjection> projection;
};

struct SimulationCheck {
  bool holds = false;
  bool decided_by_precheck = false;
  std::string detail;
};

// Compares rescale(a, pa) with the trimmed rescale(b, pb). Mode D throws
// NotDeterministic unless both sides are deterministic; ShapeError if the
// state alphabets differ after trimming.
SimulationCheck check_simulation(const Sca& a, const Sca& b, const RescaleParams& pa,
                                 const RescaleParams& pb, const Trim& trim, SimMode mode,
                                 const Budget& budget = {});
bool simulates(const Sca& a, const Sca& b, const RescaleParams& pa, const RescaleParams& pb,
               const Trim& trim, SimMode mode, const Budget& budget = {});

struct SearchBounds {
  unsigned max_m = 2;
  unsigned max_t = 2;
  long max_z = 1;
  std::uint64_t max_trims = 256;  // enumerated injections/surjections per parameter pair
};

struct SimulationWitness {
  RescaleParams pa, pb;
  Trim trim;
};

// Absence of a witness is not a disproof unless precheck_short_circuit.
struct SearchResult {
  std::optional<SimulationWitness> witness;
  bool precheck_short_circuit = false;
  std::uint64_t checked = 0;
  std::string detail;
};

// Trim stages in order: none, injection by token name, enumerated
// injections, enumerated surjections. Within a stage, parameters run over
// (m_a, t_a, z_a, m_b, t_b, z_b) lexicographically with z in 0, -1, 1, -2, ...
SearchResult search_simulation(const Sca& a, const Sca& b, const SearchBounds& bounds,
                               SimMode mode, const Budget& budget = {});

// CFCA B over Q ∪ Q×R simulating a by two steps; junk state = first Q state.
struct Host {
  Sca sca;
  Injection embedding;
};
Host cfca_host(const Sca& a, const Budget& budget = {});

struct CouplingEntry {
  Symbols r1, r2;
  Rational mass;
};

struct CouplingTable {
  Symbols window;
  int n = 0;
  int radius = 0;
  std::vector<CouplingEntry> entries;  // nonzero masses, lexicographic in (r1, r2)
  bool marginals_uniform = false;
  Rational equal_output_mass;
};

struct CouplingResult {
  std::optional<CouplingTable> table;
  std::optional<Symbols> mismatch;  // first output word with different probabilities
  Rational prob_a, prob_b;
};

// γⁿ on the centred window of length 2(n+k)+1, k = max radius: random words
// of both SCA are grouped by their central output word of length 2n+1 and
// matched by rank intervals (lexicographic order).
CouplingResult build_finite_coupling(const Sca& a, const Sca& b, const Symbols& window, int n,
                                     const Budget& budget = {});

enum class GadgetKind { SurjectivityLift, SquareNoise };
GadgetKind parse_gadget_kind(const std::string& text);

// SurjectivityLift: R = Q, G(c, s) = F(s). SquareNoise: CFCA over Q×Q with
// R = Q, G((c, c'), s) = (F(c'), s). Throws NotDeterministic.
Sca gadget(GadgetKind kind, const Sca& f, const Budget& budget = {});

}  // namespace sca

#include <gtest/gtest.h>

#include <random>

#include "sca/core.hpp"
#include "sca/simulation.hpp"
#include "sca/symbolic.hpp"
#include "sca/weighted.hpp"
#include "support/corpus.hpp"
#include "support/oracle.hpp"
#include "support/windows.hpp"

namespace sca {
namespace {

const RescaleParams kUnit{1, 1, 0};



TEST(Pack, Examples) {
  EXPECT_EQ(pack_word({0, 1, 0, 1}, 2, 2), (Symbols{1, 1}));
  EXPECT_EQ(power_alphabet(Alphabet({"0", "1"}), 2).format(pack_word({0, 1, 0, 1}, 2, 2)), "(01) (01)");
  EXPECT_EQ(pack_word({1, 0, 2}, 1, 3), (Symbols{1, 0, 2}));
  EXPECT_THROW(pack_word({0, 1, 0}, 2, 2), ShapeError);
  std::mt19937 rng(3);
  for (int i = 0; i < 50; ++i) {
    std::size_t m = 1 + rng() % 3, radix = 2 + rng() % 3;
    Symbols w(m * (1 + rng() % 4));
    for (auto& s : w) s = static_cast<Symbol>(rng() % radix);
    EXPECT_EQ(unpack_word(pack_word(w, m, radix), m, radix), w);
  }
}

TEST(Params, Parse) {
  EXPECT_EQ(RescaleParams::parse("2,1,-1"), (RescaleParams{2, 1, -1}));
  EXPECT_EQ((RescaleParams{1, 2, 0}).str(), "1,2,0");
  EXPECT_THROW(RescaleParams::parse("0,1,0"), ParseError);
  EXPECT_THROW(RescaleParams::parse("1,1"), ParseError);
  EXPECT_THROW(RescaleParams::parse("a,1,0"), ParseError);
}

TEST(Rescale, UnitIsIdentityOnCorpus) {
  for (const auto& e : corpus::all()) {
    Sca r = rescale_sca(e.sca, kUnit);
    EXPECT_EQ(r, e.sca) << e.name;
    EXPECT_TRUE(stochastic_equal(e.sca, r, 1)) << e.name;
  }
}

TEST(Rescale, IdentityShiftedIsShift) {
  Sca s = rescale_sca(corpus::identity().sca, {1, 1, 1});
  EXPECT_EQ(s.v(), (std::vector<int>{1}));
  EXPECT_TRUE(is_deterministic(s));
  for (Symbol q = 0; q < 2; ++q) EXPECT_EQ(s.apply(Symbols{q}, Symbols{0}), q);
}

TEST(Rescale, PackedBlankNoiseIsBlankNoise) {
  Sca r = rescale_sca(corpus::blank_s().sca, {2, 1, 0});
  EXPECT_EQ(r.states().size(), 4u);
  Sca blank4 = Sca::from_rule(r.states(), Alphabet(r.states().tokens()), {0}, {0},
                              [](auto, std::span<const Symbol> s) { return s[0]; });
  EXPECT_TRUE(stochastic_equal(r, blank4, 1));
}

// Packed rescaled step vs the naive t-step distribution on the fine window.
void check_against_oracle(const corpus::Entry& e, const RescaleParams& p, std::size_t super_len) {
  Sca r = rescale_sca(e.sca, p);
  const long K = r.radius(), m = p.m, k = e.sca.radius(), t = p.t;
  ASSERT_GT(static_cast<long>(super_len), 2 * K) << e.name;
  const std::size_t nq = e.sca.states().size();
  for (const auto& sup : testing::windows(checked_pow(nq, p.m), super_len, 12, 5)) {
    Symbols fine = unpack_word(sup, p.m, nq);
    auto fine_dist = oracle::naive_distribution(e, fine, static_cast<int>(t));
    // Fine output cell y sits at index y - k t; packed cell J covers m J + z ...
    std::map<Symbols, Rational> expected;
    const long lo = m * K + p.z - k * t, hi = m * (static_cast<long>(super_len) - K) + p.z - k * t;
    ASSERT_GE(lo, 0);
    for (const auto& [out, pr] : fine_dist) {
      ASSERT_LE(hi, static_cast<long>(out.size()));
      Symbols slice(out.begin() + lo, out.begin() + hi);
      expected[pack_word(slice, p.m, nq)] += pr;
    }
    auto got = pushforward_distribution(r, Word{sup, 0}, 1);
    std::map<Symbols, Rational> got_map(got.support.begin(), got.support.end());
    EXPECT_EQ(got_map, expected) << e.name << " " << p.str();
  }
}

TEST(Rescale, MatchesFineDynamics) {
  check_against_oracle(corpus::xor_ca(), {2, 1, 0}, 3);
  check_against_oracle(corpus::xor_ca(), {2, 2, 1}, 5);
  check_against_oracle(corpus::parity(), {2, 1, -1}, 4);
  check_against_oracle(corpus::random_sca(7), {1, 2, 1}, 7);
  check_against_oracle(corpus::blank_xor(), {3, 2, -2}, 3);
}

TEST(Rescale, PreservesPrimeFactors) {
  for (const auto& e : corpus::all())
    for (RescaleParams p : {RescaleParams{2, 1, 0}, RescaleParams{1, 2, 1}, RescaleParams{2, 2, -1}}) {
      Budget b;
      Sca r = [&] {
        try {
          return rescale_sca(e.sca, p, b);
        } catch (const ResourceExhausted&) {
          return e.sca;  // too large to tabulate; |R| checked below anyway
        }
      }();
      if (r == e.sca && !(p == kUnit)) {
        EXPECT_EQ(prime_factors(checked_pow(e.sca.random().size(), p.m * p.t)),
                  prime_factors(e.sca.random().size()));
        continue;
      }
      EXPECT_EQ(r.random().size(), checked_pow(e.sca.random().size(), p.m * p.t)) << e.name;
      EXPECT_EQ(prime_factors(r.random().size()), prime_factors(e.sca.random().size())) << e.name;
    }
}

TEST(Restriction, Examples) {
  Sca hash = check_restriction(corpus::parity().sca, injection_by_name(Alphabet({"#"}), corpus::parity().sca.states()));
  EXPECT_EQ(hash.states().size(), 1u);
  EXPECT_TRUE(is_deterministic(hash));
  try {
    check_restriction(corpus::blank_s().sca, {Alphabet({"0"}), {0}});
    FAIL() << "expected StabilityError";
  } catch (const StabilityError& e) {
    EXPECT_EQ(e.neighborhood, (Symbols{0}));
    EXPECT_EQ(e.random, (Symbols{1}));
  }
  for (const auto& e : corpus::all()) {
    Sca r = check_restriction(e.sca, injection_by_name(e.sca.states(), e.sca.states()));
    EXPECT_EQ(r.table(), e.sca.table()) << e.name;
  }
  EXPECT_THROW(check_restriction(corpus::blank_s().sca, {Alphabet({"0", "1"}), {0, 0}}), ShapeError);
}

// Independent product of `first` and the identity over {a,b,c}.
Sca product_with_identity(const Sca& first) {
  const std::size_t n1 = first.states().size();
  return Sca::from_rule(product_alphabet(first.states(), Alphabet({"a", "b", "c"})), first.random(),
                        first.v(), first.v_prime(),
                        [&](std::span<const Symbol> q, std::span<const Symbol> r) {
                          Symbols inner(q.size());
                          std::size_t centre = 0;
                          for (std::size_t j = 0; j < q.size(); ++j) {
                            inner[j] = q[j] / 3;
                            if (first.v()[j] == 0) centre = j;
                          }
                          (void)n1;
                          return static_cast<Symbol>(first.apply(inner.data(), r.data()) * 3 + q[centre] % 3);
                        });
}

TEST(Projection, Examples) {
  Sca xr = corpus::xor_noise().sca;
  Sca prod = product_with_identity(xr);
  Surjection first{xr.states(), {}};
  for (Symbol s = 0; s < prod.states().size(); ++s) first.image.push_back(s / 3);
  Sca proj = check_projection(prod, first);
  EXPECT_TRUE(stochastic_equal(proj, xr, 1));
  Surjection id{xr.states(), {0, 1}};
  EXPECT_EQ(check_projection(xr, id).table(), xr.table());

  Host h = cfca_host(corpus::parity().sca);
  const std::size_t nq = 3;
  Surjection collapse{corpus::parity().sca.states(), {}};
  for (Symbol s = 0; s < h.sca.states().size(); ++s)
    collapse.image.push_back(s < nq ? s : static_cast<Symbol>((s - nq) / 2));
  EXPECT_THROW(check_projection(h.sca, collapse), CompatibilityError);
  EXPECT_THROW(check_projection(xr, {xr.states(), {0, 0}}), ShapeError);
}

TEST(Projection, RestrictionAndProjectionCommute) {
  Sca xr = corpus::xor_noise().sca;
  Sca prod = product_with_identity(xr);
  // Restrict the second component to {a,b}, project onto the first.
  Alphabet sub = product_alphabet(xr.states(), Alphabet({"a", "b"}));
  Injection ab{sub, {}};
  for (Symbol s = 0; s < sub.size(); ++s) ab.image.push_back((s / 2) * 3 + s % 2);
  Sca restricted = check_restriction(prod, ab);
  Surjection to_first{xr.states(), {}};
  for (Symbol s = 0; s < sub.size(); ++s) to_first.image.push_back(s / 2);
  Sca order1 = check_projection(restricted, to_first);
  Surjection full_first{xr.states(), {}};
  for (Symbol s = 0; s < prod.states().size(); ++s) full_first.image.push_back(s / 3);
  Sca order2 = check_restriction(check_projection(prod, full_first),
                                 injection_by_name(xr.states(), xr.states()));
  EXPECT_TRUE(stochastic_equal(order1, order2, 1));
}

TEST(Host, Sizes) {
  EXPECT_EQ(cfca_host(corpus::parity().sca).sca.states().size(), 9u);
  EXPECT_EQ(cfca_host(corpus::blank_s().sca).sca.states().size(), 6u);
  EXPECT_TRUE(cfca_host(corpus::parity().sca).sca.cfca_flag());
}

TEST(Simulates, ParityByHost) {
  Host h = cfca_host(corpus::parity().sca);
  EXPECT_TRUE(simulates(corpus::parity().sca, h.sca, kUnit, {1, 2, 0}, {h.embedding, std::nullopt},
                        SimMode::S));
  // One host step is not stable on Q.
  auto one = check_simulation(corpus::parity().sca, h.sca, kUnit, kUnit, {h.embedding, std::nullopt},
                              SimMode::S);
  EXPECT_FALSE(one.holds);
}

TEST(Simulates, HostOfBlankNoiseAndDeterministic) {
  Host hb = cfca_host(corpus::blank_s().sca);
  EXPECT_TRUE(simulates(corpus::blank_s().sca, hb.sca, kUnit, {1, 2, 0}, {hb.embedding, std::nullopt},
                        SimMode::S));
  Host hx = cfca_host(corpus::xor_ca().sca);
  EXPECT_TRUE(simulates(corpus::xor_ca().sca, hx.sca, kUnit, {1, 2, 0}, {hx.embedding, std::nullopt},
                        SimMode::D));
}

TEST(Simulates, ReflexiveOnCorpus) {
  for (const auto& e : corpus::all()) {
    EXPECT_TRUE(simulates(e.sca, e.sca, kUnit, kUnit, {}, SimMode::S)) << e.name;
    if (e.sca.radius() <= 1) EXPECT_TRUE(simulates(e.sca, e.sca, kUnit, kUnit, {}, SimMode::N)) << e.name;
    if (is_deterministic(e.sca)) EXPECT_TRUE(simulates(e.sca, e.sca, kUnit, kUnit, {}, SimMode::D)) << e.name;
  }
}

TEST(Simulates, PrimeFactorsBlock) {
  auto r = check_simulation(corpus::blank_s().sca, corpus::biased_noise().sca, kUnit, kUnit, {},
                            SimMode::S);
  EXPECT_FALSE(r.holds);
  EXPECT_TRUE(r.decided_by_precheck);
  auto s = search_simulation(corpus::blank_s().sca, corpus::biased_noise().sca, {}, SimMode::S);
  EXPECT_FALSE(s.witness);
  EXPECT_TRUE(s.precheck_short_circuit);
  EXPECT_THROW(simulates(corpus::blank_s().sca, corpus::xor_noise().sca, kUnit, kUnit, {}, SimMode::D),
               NotDeterministic);
}

TEST(Simulates, TransitiveChain) {
  Sca a = corpus::xor_ca().sca;
  Sca b = rescale_sca(a, {2, 1, 0});
  Sca c = rescale_sca(b, {1, 2, 0});
  EXPECT_TRUE(simulates(a, b, {2, 1, 0}, kUnit, {}, SimMode::S));
  EXPECT_TRUE(simulates(b, c, {1, 2, 0}, kUnit, {}, SimMode::S));
  EXPECT_TRUE(simulates(a, c, {2, 2, 0}, kUnit, {}, SimMode::S));
}

TEST(Search, FindsPacking) {
  Sca a = corpus::xor_noise().sca;
  auto r = search_simulation(a, rescale_sca(a, {2, 1, 0}), {}, SimMode::S);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->pa, (RescaleParams{2, 1, 0}));
  EXPECT_EQ(r.witness->pb, kUnit);
  EXPECT_FALSE(r.witness->trim.restriction);
}

TEST(Search, FindsHostInjection) {
  Host h = cfca_host(corpus::parity().sca);
  auto r = search_simulation(corpus::parity().sca, h.sca, {}, SimMode::S);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->pa, kUnit);
  EXPECT_EQ(r.witness->pb, (RescaleParams{1, 2, 0}));
  ASSERT_TRUE(r.witness->trim.restriction);
  EXPECT_EQ(r.witness->trim.restriction->image, h.embedding.image);
}

// Noisy or deterministic simulators only simulate their own class.
TEST(Simulates, IdealsOnWitnesses) {
  std::vector<corpus::Entry> es{corpus::blank_s(), corpus::blank_xor(), corpus::identity(),
                                corpus::constant0(), corpus::xor_ca(), corpus::xor_noise(),
                                corpus::random_sca(7), corpus::blank_r4()};
  int witnesses = 0;
  for (const auto& a : es)
    for (const auto& b : es) {
      if (!simulates(a.sca, b.sca, kUnit, kUnit, {}, SimMode::N)) continue;
      ++witnesses;
      if (is_deterministic(b.sca)) EXPECT_TRUE(is_deterministic(a.sca)) << a.name << " " << b.name;
      if (is_noisy(b.sca).answer) EXPECT_TRUE(is_noisy(a.sca).answer) << a.name << " " << b.name;
    }
  EXPECT_GT(witnesses, static_cast<int>(es.size()));
}

TEST(Coupling, BlankNoiseTables) {
  Sca a = corpus::blank_s().sca, b = corpus::blank_xor().sca;
  auto r0 = build_finite_coupling(a, b, {0}, 0);
  ASSERT_TRUE(r0.table);
  ASSERT_EQ(r0.table->entries.size(), 2u);
  EXPECT_EQ(r0.table->entries[0].r1, (Symbols{0}));
  EXPECT_EQ(r0.table->entries[0].r2, (Symbols{0}));
  EXPECT_EQ(r0.table->entries[0].mass, Rational(1, 2));
  EXPECT_EQ(r0.table->entries[1].r1, (Symbols{1}));
  EXPECT_EQ(r0.table->entries[1].r2, (Symbols{1}));
  EXPECT_TRUE(r0.table->marginals_uniform);
  EXPECT_EQ(r0.table->equal_output_mass, 1);
  auto r1 = build_finite_coupling(a, b, {1}, 0);
  ASSERT_TRUE(r1.table);
  ASSERT_EQ(r1.table->entries.size(), 2u);
  EXPECT_EQ(r1.table->entries[0].r2, (Symbols{1}));
  EXPECT_EQ(r1.table->entries[1].r2, (Symbols{0}));
  EXPECT_EQ(r1.table->entries[1].mass, Rational(1, 2));
  // 1/2 on a = b + c_z mod 2 for every longer window as well.
  auto r2 = build_finite_coupling(a, b, {1, 0, 1}, 1);
  ASSERT_TRUE(r2.table);
  for (const auto& e : r2.table->entries)
    for (std::size_t z = 0; z < 3; ++z) EXPECT_EQ(e.r1[z], (e.r2[z] + Symbols{1, 0, 1}[z]) % 2);
}

TEST(Coupling, BiasedNoiseInfeasible) {
  auto r = build_finite_coupling(corpus::blank_s().sca, corpus::biased_noise().sca, {0}, 0);
  EXPECT_FALSE(r.table);
  ASSERT_TRUE(r.mismatch);
  EXPECT_EQ(*r.mismatch, (Symbols{0}));
  EXPECT_EQ(r.prob_a, Rational(1, 2));
  EXPECT_EQ(r.prob_b, Rational(2, 3));
  EXPECT_THROW(build_finite_coupling(corpus::blank_s().sca, corpus::xor_ca().sca, {0}, 0), ShapeError);
}

// Feasible exactly when the central pushforwards agree.
TEST(Coupling, FeasibleIffDistributionsAgree) {
  std::vector<corpus::Entry> es{corpus::blank_s(), corpus::blank_xor(), corpus::biased_noise(),
                                corpus::blank_r4(), corpus::identity(), corpus::xor_ca(),
                                corpus::xor_noise(), corpus::random_sca(7)};
  for (const auto& a : es)
    for (const auto& b : es) {
      const int k = std::max(a.sca.radius(), b.sca.radius());
      const bool equal = stochastic_equal(a.sca, b.sca, 1);
      for (int n = 0; n <= 1; ++n) {
        const std::size_t len = static_cast<std::size_t>(2 * (n + k) + 1);
        for (const auto& w : testing::windows(2, len, 8, 11)) {
          auto central = [&](const corpus::Entry& e) {
            std::map<Symbols, Rational> d;
            const long skip = k - e.sca.radius();
            for (const auto& [u, p] : oracle::naive_distribution(e, w, 1))
              d[Symbols(u.begin() + skip, u.begin() + skip + 2 * n + 1)] += p;
            return d;
          };
          const bool agree = central(a) == central(b);
          auto r = build_finite_coupling(a.sca, b.sca, w, n);
          EXPECT_EQ(r.table.has_value(), agree) << a.name << " " << b.name;
          if (equal) EXPECT_TRUE(r.table) << a.name << " " << b.name;
          if (r.table) {
            EXPECT_TRUE(r.table->marginals_uniform);
            EXPECT_EQ(r.table->equal_output_mass, 1);
          }
        }
      }
    }
}

TEST(Gadget, SurjectivityLiftExamples) {
  Sca lift_id = gadget(GadgetKind::SurjectivityLift, corpus::identity().sca);
  EXPECT_TRUE(stochastic_equal(lift_id, corpus::blank_s().sca, 1));
  EXPECT_TRUE(is_noisy(lift_id).answer);
  EXPECT_FALSE(is_noisy(gadget(GadgetKind::SurjectivityLift, corpus::constant0().sca)).answer);
  EXPECT_THROW(gadget(GadgetKind::SquareNoise, corpus::blank_s().sca), NotDeterministic);
}

TEST(Gadget, SquareNoiseOfXorIsUniformAfterTwoSteps) {
  Sca g = gadget(GadgetKind::SquareNoise, corpus::xor_ca().sca);
  EXPECT_TRUE(g.cfca_flag());
  Sca g2 = iterate_sca(g, 2);
  const std::size_t len = 2 * static_cast<std::size_t>(g2.radius()) + 2;
  for (const auto& w : testing::windows(4, len, 24, 2)) {
    auto d = pushforward_distribution(g2, Word{w, 0}, 1);
    ASSERT_EQ(d.support.size(), 16u);
    for (const auto& [u, p] : d.support) EXPECT_EQ(p, Rational(1, 16));
  }
}

TEST(Gadget, SquareNoisePairsEqualOnlyAtTwoSteps) {
  Sca a = gadget(GadgetKind::SquareNoise, corpus::xor_ca().sca);
  Sca b = gadget(GadgetKind::SquareNoise, corpus::identity().sca);
  EXPECT_FALSE(stochastic_equal(a, b, 1));
  EXPECT_TRUE(stochastic_equal(a, b, 2));
  Sca c = gadget(GadgetKind::SquareNoise, corpus::constant0().sca);
  EXPECT_FALSE(stochastic_equal(a, c, 2));
}

TEST(Gadget, LiftNoisyIffSurjective) {
  int surjective = 0, total = 0;
  for (std::size_t n : {2, 3})
    for (unsigned seed = 1; seed <= 8; ++seed) {
      Sca f = corpus::random_det_ca(seed, n).sca;
      const bool s = is_surjective(f).answer;
      EXPECT_EQ(is_noisy(gadget(GadgetKind::SurjectivityLift, f)).answer, s) << seed << " " << n;
      surjective += s;
      ++total;
    }
  for (unsigned rule : {15u, 30u, 45u, 60u, 90u, 105u, 150u, 170u, 204u, 240u}) {
    Sca f = corpus::elementary(rule).sca;
    const bool s = is_surjective(f).answer;
    EXPECT_EQ(is_noisy(gadget(GadgetKind::SurjectivityLift, f)).answer, s) << rule;
    surjective += s;
    ++total;
  }
  EXPECT_GT(surjective, 0);
  EXPECT_LT(surjective, total);
}

}  // namespace
}  // namespace sca

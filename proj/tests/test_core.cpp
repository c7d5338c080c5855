#include <gtest/gtest.h>

#include <cmath>

#include "sca/core.hpp"
#include "support/corpus.hpp"
#include "support/oracle.hpp"
#include "support/windows.hpp"

namespace sca {
namespace {

Word W(const Sca& a, const std::string& text, long offset = 0) {
  return Word{a.states().parse(text), offset};
}
Word RW(const Sca& a, const std::string& text, long offset = 0) {
  return Word{a.random().parse(text), offset};
}
Rational Q(const char* s) { return parse_rational(s); }

const char* kBlankDoc = R"({
  "states": ["0", "1"], "random": ["0", "1"],
  "neighborhood": [0], "random_neighborhood": [0],
  "rule": {"0|0": "0", "0|1": "1", "1|0": "0", "1|1": "1"}
})";

TEST(Rational, RoundTripsThroughText) {
  for (const char* s : {"0/1", "1/2", "-3/7", "12345678901234567891/2"})
    EXPECT_EQ(to_string(parse_rational(s)), s);
  EXPECT_EQ(to_string(parse_rational("4/8")), "1/2");
  EXPECT_EQ(to_string(parse_rational("5")), "5/1");
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("a/2"), ParseError);
}

TEST(Alphabet, TokenizesMultiCharacterTokens) {
  Alphabet a({"↦", "→", "✓", "ab", "a"});
  EXPECT_EQ(a.parse("↦aab✓"), (Symbols{0, 4, 3, 2}));
  EXPECT_EQ(a.parse("ab a"), (Symbols{3, 4}));
  EXPECT_THROW(a.parse("x"), ParseError);
  EXPECT_THROW(Alphabet({"0", "0"}), ParseError);
}

TEST(ParseSca, BlankNoiseDocument) {
  Sca a = parse_sca_text(kBlankDoc);
  EXPECT_EQ(a.radius(), 0);
  EXPECT_TRUE(a.cfca_flag());
  EXPECT_EQ(a, corpus::blank_s().sca);
}

TEST(ParseSca, ParityDocumentRoundTrip) {
  Sca p = corpus::parity().sca;
  Sca back = parse_sca(to_json(p));
  EXPECT_EQ(back, p);
  EXPECT_EQ(back.radius(), 1);
  EXPECT_FALSE(back.cfca_flag());
}

TEST(ParseSca, RejectsNonTotalTable) {
  auto doc = nlohmann::json::parse(kBlankDoc);
  doc["rule"].erase("1|1");
  try {
    parse_sca(doc);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("rule not total"), std::string::npos);
  }
  doc["default"] = "0";
  EXPECT_NO_THROW(parse_sca(doc));
  doc["rule"]["1|1"] = "2";
  EXPECT_THROW(parse_sca(doc), ParseError);
}

TEST(ParseSca, LocalDistributionCompilesToLcmAlphabet) {
  auto doc = nlohmann::json::parse(R"({
    "states": ["x", "y", "z", "o"], "neighborhood": [0],
    "local_distribution": {"x": {"x": "1/4", "y": "1/2", "z": "1/4"}},
    "default": "o"})");
  Sca a = parse_sca(doc);
  EXPECT_EQ(a.random().size(), 4u);
  EXPECT_TRUE(a.cfca_flag());
  auto ld = local_distribution(a);
  EXPECT_EQ(ld.at({0}), (std::vector<Rational>{Q("1/4"), Q("1/2"), Q("1/4"), 0}));
  EXPECT_EQ(ld.at({1}), (std::vector<Rational>{0, 0, 0, 1}));
}

TEST(LocalDistribution, Examples) {
  auto blank = local_distribution(corpus::blank_s().sca);
  EXPECT_EQ(blank.at({0}), (std::vector<Rational>{Q("1/2"), Q("1/2")}));
  auto id = local_distribution(corpus::identity().sca);
  EXPECT_EQ(id.at({1}), (std::vector<Rational>{0, 1}));
  auto biased = local_distribution(corpus::biased_noise().sca);
  EXPECT_EQ(biased.at({0}), (std::vector<Rational>{Q("2/3"), Q("1/3")}));
  EXPECT_THROW(local_distribution(corpus::parity().sca), NotCfca);
}

TEST(Canonicalize, PadsAndIsIdempotent) {
  Sca a = Sca::from_rule(Alphabet({"0", "1"}), Alphabet({"0", "1"}), {0, 1}, {0},
                         [](auto q, auto r) { return (q[0] + q[1] + r[0]) % 2; });
  Sca c = canonicalize(a);
  EXPECT_EQ(c.v(), (std::vector<int>{-1, 0, 1}));
  EXPECT_EQ(c.v_prime(), (std::vector<int>{-1, 0, 1}));
  EXPECT_TRUE(c.cfca_flag());
  Symbols q(3), r(3);
  do {
    do {
      Symbols qa{q[1], q[2]}, ra{r[1]};
      EXPECT_EQ(c.apply(q, r), a.apply(qa, ra));
    } while (next_word(r, 2));
  } while (next_word(q, 2));
  EXPECT_EQ(canonicalize(c), c);
  EXPECT_EQ(canonicalize(corpus::blank_s().sca), corpus::blank_s().sca);
}

TEST(MinimizeNeighborhoods, DropsUnusedOffsets) {
  Sca padded = pad_to_radius(corpus::blank_xor().sca, 2);
  Sca m = minimize_neighborhoods(padded);
  EXPECT_EQ(m.v(), std::vector<int>{0});
  EXPECT_EQ(m.v_prime(), std::vector<int>{0});
  EXPECT_EQ(m, corpus::blank_xor().sca);
}

TEST(IsDeterministic, Examples) {
  EXPECT_TRUE(is_deterministic(corpus::identity().sca));
  EXPECT_FALSE(is_deterministic(corpus::blank_s().sca));
  EXPECT_FALSE(is_deterministic(corpus::parity().sca));
  EXPECT_TRUE(is_cfca(corpus::blank_s().sca));
  EXPECT_FALSE(is_cfca(corpus::parity().sca));
  EXPECT_TRUE(is_cfca(corpus::two_step_conserving().sca));
}

TEST(ApplyWindow, Examples) {
  Sca blank = corpus::blank_s().sca;
  EXPECT_EQ(apply_window(blank, W(blank, "01"), RW(blank, "10")), W(blank, "10"));
  Sca p = corpus::parity().sca;
  for (const char* v : {"0100", "0101", "1110", "1111"})
    EXPECT_EQ(apply_window(p, W(p, "#00#"), RW(p, v)), W(p, "11", 1));
  Sca id = corpus::identity_abc().sca;
  EXPECT_EQ(apply_window(id, W(id, "abc"), RW(id, "000")), W(id, "abc"));
  EXPECT_THROW(apply_window(p, W(p, "#0"), RW(p, "00")), ShapeError);
  EXPECT_THROW(apply_window(p, W(p, "#00#"), RW(p, "000")), ShapeError);
}

TEST(CylinderProb, Examples) {
  Sca blank = corpus::blank_s().sca;
  EXPECT_EQ(cylinder_prob(blank, W(blank, "0"), W(blank, "0"), 1), Q("1/2"));
  Sca p = corpus::parity().sca;
  EXPECT_EQ(cylinder_prob(p, W(p, "#00#"), W(p, "00"), 1), Q("1/2"));
  EXPECT_EQ(cylinder_prob(p, W(p, "#00#"), W(p, "01"), 1), 0);
  Budget tiny;
  tiny.max_enum = 2;
  EXPECT_THROW(cylinder_prob(p, W(p, "#00#"), W(p, "00"), 1, tiny), ResourceExhausted);
}

TEST(Pushforward, Examples) {
  Sca blank = corpus::blank_s().sca;
  auto d = pushforward_distribution(blank, W(blank, "00"), 1);
  EXPECT_EQ(d.support.size(), 4u);
  for (const auto& [w, p] : d.support) EXPECT_EQ(p, Q("1/4"));

  Sca p = corpus::parity().sca;
  auto dp = pushforward_distribution(p, W(p, "#00#"), 1);
  EXPECT_EQ(dp.offset, 1);
  EXPECT_EQ(dp.support.size(), 2u);
  EXPECT_EQ(dp.at(p.states().parse("00")), Q("1/2"));
  EXPECT_EQ(dp.at(p.states().parse("11")), Q("1/2"));

  Sca part = corpus::particle().sca;
  auto dq = pushforward_distribution(part, W(part, "000010000"), 1);
  EXPECT_EQ(dq.support.size(), 3u);
  for (const char* w : {"01000", "00100", "00010"})
    EXPECT_EQ(dq.at(part.states().parse(w)), Q("1/3"));
}

TEST(StepPeriodic, Examples) {
  Sca id = corpus::identity().sca;
  PeriodicConfig c{id.states().parse("0110"), 0};
  EXPECT_EQ(step_periodic(id, c, PeriodicConfig{{0}, 0}), c);

  Sca blank = corpus::blank_s().sca;
  auto out = step_periodic(blank, PeriodicConfig{{0}, 0}, PeriodicConfig{{0, 1}, 0});
  EXPECT_EQ(out.period, (Symbols{0, 1}));

  Sca part = corpus::particle().sca;
  PeriodicConfig pc{part.states().parse("0001000"), 0};
  EXPECT_EQ(step_periodic(part, pc, PeriodicConfig{{1}, 0}), pc);

  Budget small;
  small.max_period = 5;
  EXPECT_THROW(step_periodic(blank, PeriodicConfig{{0, 1, 1}, 0}, PeriodicConfig{{0, 1}, 0}, small),
               ResourceExhausted);
}

TEST(IterateSca, IdentityAndBlankNoise) {
  Sca id = corpus::identity().sca;
  Sca id3 = iterate_sca(id, 3);
  EXPECT_TRUE(is_deterministic(id3));
  for (const char* u : {"0", "1"})
    EXPECT_EQ(cylinder_prob(id3, W(id3, u), W(id3, u), 1), 1);

  Sca blank = corpus::blank_s().sca;
  Sca b2 = iterate_sca(blank, 2);
  EXPECT_EQ(b2.random().size(), 4u);
  // Output is the second random layer.
  for (Symbol r = 0; r < 4; ++r) EXPECT_EQ(b2.apply(Symbols{0}, Symbols{r}), r % 2);
  EXPECT_EQ(cylinder_prob(b2, W(b2, "0"), W(b2, "1"), 1), Q("1/2"));
}

TEST(IterateSca, MatchesMultiStepProbabilities) {
  for (const auto& e : {corpus::parity(), corpus::xor_noise(), corpus::random_sca(3)}) {
    Sca a2 = iterate_sca(e.sca, 2);
    for (const auto& u : testing::windows(e.sca.states().size(), 5, 40)) {
      auto d = pushforward_distribution(e.sca, Word{u, 0}, 2);
      for (const auto& [w, p] : d.support)
        EXPECT_EQ(cylinder_prob(a2, Word{u, 0}, Word{w, 2}, 1), p) << e.name;
    }
  }
}

TEST(SampleDiagram, IdentityIsConstant) {
  Sca id = corpus::identity().sca;
  PeriodicConfig c{id.states().parse("01101"), 0};
  auto d = sample_diagram(id, c, 5, 1);
  ASSERT_EQ(d.rows.size(), 6u);
  for (const auto& row : d.rows) EXPECT_EQ(row, c);
}

TEST(SampleDiagram, BlankNoiseFrequencyAndReproducibility) {
  Sca blank = corpus::blank_s().sca;
  PeriodicConfig c{Symbols(1000, 0), 0};
  auto d = sample_diagram(blank, c, 1, 42);
  double zeros = 0;
  for (Symbol s : d.rows[1].period) zeros += s == 0;
  EXPECT_NEAR(zeros / 1000, 0.5, 4 * std::sqrt(0.25 / 1000));
  auto again = sample_diagram(blank, c, 1, 42);
  EXPECT_EQ(again.rows, d.rows);
}

TEST(Conservation, ParticleConserves) {
  auto v = conservation_check(corpus::particle().sca, 3, 1);
  EXPECT_TRUE(v.conserving) << v.reason;
}

TEST(Conservation, LiteralParticleTableLosesParticles) {
  Sca lit = corpus::particle_literal().sca;
  auto v = conservation_check(lit, 3, 1);
  ASSERT_FALSE(v.conserving);
  EXPECT_EQ(lit.states().format(v.input.symbols), "101");
  EXPECT_EQ(v.input_sum, 2);
  EXPECT_EQ(v.output_sum, 1);
}

TEST(Conservation, TwoStepFailsOnceAndConservesSquared) {
  Sca f = corpus::two_step_conserving().sca;
  auto one = conservation_check(f, 4, 1);
  ASSERT_FALSE(one.conserving);
  EXPECT_NE(one.input_sum, one.output_sum);
  auto two = conservation_check(f, 7, 2);
  EXPECT_TRUE(two.conserving) << f.states().format(two.input.symbols) << " -> "
                              << f.states().format(two.output.symbols);
}

// --- properties -------------------------------------------------------------

std::vector<corpus::Entry> small_corpus() {
  std::vector<corpus::Entry> out;
  for (auto& e : corpus::all())
    if (e.sca.radius() <= 2) out.push_back(e);
  return out;
}

TEST(Properties, CylinderProbMatchesNaiveOracle) {
  for (const auto& e : small_corpus()) {
    const std::size_t len = 2 * static_cast<std::size_t>(e.sca.radius()) + 2;
    for (const auto& u : testing::windows(e.sca.states().size(), len, 24)) {
      auto naive = oracle::naive_distribution(e, u, 1);
      auto d = pushforward_distribution(e.sca, Word{u, 0}, 1);
      EXPECT_EQ(d.support, naive) << e.name;
      for (const auto& [w, p] : naive)
        EXPECT_EQ(cylinder_prob(e.sca, Word{u, 0}, Word{w, e.sca.radius()}, 1), p) << e.name;
    }
  }
}

TEST(Properties, TwoStepDistributionsMatchOracleAndSumToOne) {
  for (const auto& e : small_corpus()) {
    if (e.sca.radius() > 1) continue;
    const std::size_t len = 4 * static_cast<std::size_t>(e.sca.radius()) + 1;
    for (const auto& u : testing::windows(e.sca.states().size(), len, 12)) {
      auto d = pushforward_distribution(e.sca, Word{u, 0}, 2);
      EXPECT_EQ(d.total(), 1) << e.name;
      EXPECT_EQ(d.support, oracle::naive_distribution(e, u, 2)) << e.name;
    }
  }
}

TEST(Properties, CanonicalizePreservesProbabilities) {
  for (const auto& e : small_corpus()) {
    Sca c = canonicalize(e.sca);
    const std::size_t len = 2 * static_cast<std::size_t>(e.sca.radius()) + 1;
    for (const auto& u : testing::windows(e.sca.states().size(), len, 16)) {
      auto d = pushforward_distribution(e.sca, Word{u, 0}, 1);
      EXPECT_EQ(pushforward_distribution(c, Word{u, 0}, 1).support, d.support) << e.name;
    }
  }
}

TEST(Properties, CfcaProbabilityIsProductOfLocalDistributions) {
  for (const auto& e : corpus::all()) {
    if (!e.sca.cfca_flag() || e.sca.radius() > 2) continue;
    auto ld = local_distribution(e.sca);
    const int k = e.sca.radius();
    for (const auto& u : testing::windows(e.sca.states().size(), 2 * static_cast<std::size_t>(k) + 2, 16)) {
      auto d = pushforward_distribution(e.sca, Word{u, 0}, 1);
      for (const auto& w : testing::windows(e.sca.states().size(), 2, 16)) {
        Rational prod = 1;
        for (std::size_t j = 0; j < w.size(); ++j) {
          Symbols nb;
          for (int v : e.sca.v()) nb.push_back(u[j + static_cast<std::size_t>(k + v)]);
          prod *= ld.at(nb)[w[j]];
        }
        EXPECT_EQ(d.at(w), prod) << e.name;
      }
    }
  }
}

TEST(Properties, WindowProbabilityAgreesWithEnumeration) {
  for (const auto& e : small_corpus()) {
    const std::size_t len = 2 * static_cast<std::size_t>(e.sca.radius()) + 2;
    for (const auto& u : testing::windows(e.sca.states().size(), len, 16)) {
      auto d = pushforward_distribution(e.sca, Word{u, 0}, 1);
      for (const auto& w : testing::windows(e.sca.states().size(), 2, 16))
        EXPECT_EQ(window_probability(e.sca, u, w), d.at(w)) << e.name;
    }
  }
}

TEST(Properties, DeterministicMeansSingletonSupport) {
  for (const auto& e : corpus::all()) {
    if (!is_deterministic(e.sca) || e.sca.radius() > 2) continue;
    for (const auto& u : testing::windows(e.sca.states().size(), 2 * static_cast<std::size_t>(e.sca.radius()) + 3, 32))
      EXPECT_EQ(pushforward_distribution(e.sca, Word{u, 0}, 1).support.size(), 1u) << e.name;
  }
}

TEST(Properties, ImageWordsAreTheSupportOfThePushforward) {
  for (const auto& e : small_corpus()) {
    const int k = e.sca.radius();
    for (const auto& c : testing::windows(e.sca.states().size(), 2, 8)) {
      // Embed c in background 0 explicitly and compare.
      Symbols u(4 * static_cast<std::size_t>(k), 0);
      u.insert(u.begin() + 2 * k, c.begin(), c.end());
      auto d = pushforward_distribution(e.sca, Word{u, -2L * k}, 1);
      std::set<Symbols> support;
      for (const auto& [w, p] : d.support) support.insert(w);
      EXPECT_EQ(image_words(e.sca, Word{c, 0}, 0), support) << e.name;
    }
  }
}

TEST(Properties, ConservingCfcaAreDeterministic) {
  for (const auto& e : corpus::all()) {
    if (!e.sca.cfca_flag()) continue;
    auto v = conservation_check(e.sca, 4, 1);
    if (v.conserving) EXPECT_TRUE(is_deterministic(e.sca)) << e.name;
  }
}

}  // namespace
}  // namespace sca

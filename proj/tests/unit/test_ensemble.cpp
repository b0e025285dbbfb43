#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qevo/chem_props.hpp"
#include "qevo/ensemble.hpp"
#include "qevo/error.hpp"
#include "qevo/rng.hpp"
#include "qevo/selfies_decoder.hpp"

namespace qevo {
namespace {

std::string random_bits(Philox& rng, int n) {
  std::string s(n, '0');
  for (auto& c : s) c = rng.below(2) ? '1' : '0';
  return s;
}

ScoreCache plogp_cache() {
  return ScoreCache(codec::TokenVocabulary::preset("table_2_3"), Scorer(ScorerSpec::parse("plogp")));
}

TEST(Ensemble, AverageMatchesBruteForce) {
  auto vocab = codec::TokenVocabulary::preset("table_2_3");
  auto cache = plogp_cache();
  Philox rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    sim::SampleHistogram h;
    int keys = 1 + int(rng.below(40));
    for (int i = 0; i < keys; ++i) h.add(random_bits(rng, 18), 1 + rng.below(100));
    double sum = 0.0;
    for (const auto& [bits, n] : h.counts)
      sum += double(n) * chem::plogp_loss(selfies::decode_bitstring(bits, vocab)).value;
    worst = std::max(worst, std::abs(ensemble_average(h, cache) - sum / double(h.shots)));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Ensemble, PurityEdgeCases) {
  sim::SampleHistogram same;
  same.add("000000", 1024);
  EXPECT_EQ(purity(same), 1.0 - 1.0 / 1024.0);
  sim::SampleHistogram distinct;
  for (int i = 0; i < 64; ++i) {
    std::string b(6, '0');
    for (int j = 0; j < 6; ++j) b[j] = ((i >> (5 - j)) & 1) ? '1' : '0';
    distinct.add(b);
  }
  EXPECT_EQ(purity(distinct), 0.0);
}

TEST(Ensemble, LossCombinesTargetAndRegulariser) {
  auto cache = plogp_cache();
  sim::SampleHistogram h;
  h.add("000000000000000000", 3);  // hexane
  h.add("000000000000000001", 1);  // pentanol
  LossConfig cfg{-3.0, 0.5, RegForm::OneMinusSum};
  auto s = total_loss(h, cfg, cache);
  double pm = (3 * -2.5866 + -1.1689) / 4;
  EXPECT_NEAR(s.p_m, pm, 1e-3);
  EXPECT_DOUBLE_EQ(s.sum_sq_weights, 0.75 * 0.75 + 0.25 * 0.25);
  EXPECT_NEAR(s.loss, std::abs(s.p_m + 3.0) + 0.5 * (1.0 - s.sum_sq_weights), 1e-12);
  cfg.reg_form = RegForm::NegativeSum;
  auto n = total_loss(h, cfg, cache);
  EXPECT_NEAR(n.loss, std::abs(s.p_m + 3.0) - 0.5 * s.sum_sq_weights, 1e-12);
  EXPECT_EQ(s.unique_count, 2u);
}

TEST(Ensemble, NonFiniteScoreThrows) {
  Scorer nan_scorer("nan", [](const chem::MoleculeGraph&) {
    return chem::PropertyScore{std::numeric_limits<double>::quiet_NaN(), true};
  });
  ScoreCache cache(codec::TokenVocabulary::preset("table_2_3"), nan_scorer);
  sim::SampleHistogram h;
  h.add("000000000000000000");
  try {
    total_loss(h, {}, cache);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonFiniteLoss);
  }
}

TEST(ScoreCacheTest, ScoresEachMoleculeOnce) {
  auto cache = plogp_cache();
  // a leading [Ring1] and a trailing [Branch1] have nothing to act on: both are pentane
  auto& a = cache.lookup("110000000000000000");
  auto& b = cache.lookup("000000000000000111");
  EXPECT_EQ(&a, &b);
  auto& inv = cache.lookup("110110110110110110");
  EXPECT_FALSE(inv.valid);
  EXPECT_EQ(inv.score, 1.0);
  EXPECT_EQ(cache.scored(), 2u);
}

}  // namespace
}  // namespace qevo

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>

#include "golden.hpp"
#include "qevo/error.hpp"
#include "qevo/canonical.hpp"
#include "qevo/reference_space.hpp"
#include "qevo/selfies_decoder.hpp"

namespace qevo {
namespace {

const codec::TokenVocabulary& vocab3() {
  static const auto v = codec::TokenVocabulary::preset("table_2_3");
  return v;
}

const Scorer& plogp() {
  static const Scorer s(ScorerSpec::parse("plogp"));
  return s;
}

TEST(ReferenceSpaceTest, SixTokenCountMatchesGolden) {
  auto counts = qevo::testing::load_unique_counts();
  auto start = std::chrono::steady_clock::now();
  auto ref = enumerate(vocab3(), 6, plogp());
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(ref.unique_decodings(), counts.at(6));
  EXPECT_EQ(ref.unique_decodings(), 5790u);
  EXPECT_EQ(ref.total_multiplicity(), 1ull << 18);
  EXPECT_LT(seconds, 60.0);
  ASSERT_FALSE(ref.ranking().empty());
  EXPECT_NEAR(ref.ranking().front().score, -2.5866, 1e-3);
}

TEST(ReferenceSpaceTest, SevenTokenCountMatchesGolden) {
  auto ref = enumerate(vocab3(), 7, plogp());
  EXPECT_EQ(ref.unique_decodings(), qevo::testing::load_unique_counts().at(7));
  EXPECT_EQ(ref.unique_decodings(), 25218u);
  EXPECT_EQ(ref.total_multiplicity(), 1ull << 21);
}

TEST(ReferenceSpaceTest, GoldenMoleculesAllPresent) {
  auto ref = enumerate(vocab3(), 6, plogp());
  for (const auto& row : qevo::testing::load_logp_golden(6)) {
    auto g = selfies::decode_bitstring(row.bits, vocab3());
    ASSERT_NE(ref.find(canonicalize(g).text), nullptr) << row.smiles;
  }
}

TEST(ReferenceSpaceTest, DrugScoresMatchGolden) {
  auto spec = ScorerSpec::parse("drug{2,1,0}");
  spec.branch = chem::LargeRingBranch::Penalize;
  auto ref = enumerate(vocab3(), 6, Scorer(spec));
  for (const auto& row : qevo::testing::load_logp_golden(6)) {
    const auto* e = ref.find(chem::canonicalize(selfies::decode_bitstring(row.bits, vocab3())).text);
    ASSERT_NE(e, nullptr) << row.smiles;
    EXPECT_NEAR(e->score, row.drug_loss, 1e-6) << row.smiles;
  }
}

TEST(ReferenceSpaceTest, RankingIsSortedAndIndexed) {
  auto ref = enumerate(vocab3(), 6, plogp());
  const auto& r = ref.ranking();
  for (std::size_t i = 1; i < r.size(); ++i) ASSERT_LE(r[i - 1].score, r[i].score);
  EXPECT_EQ(ref.rank_of(r[10].canonical), 10);
  EXPECT_EQ(ref.rank_of("not a molecule"), -1);
  EXPECT_EQ(ref.top_k(10).size(), 10u);
}

TEST(ReferenceSpaceTest, SaveLoadRoundTrip) {
  auto ref = enumerate(vocab3(), 6, plogp());
  auto path = std::filesystem::temp_directory_path() / "qevo_ref_roundtrip.ref";
  ref.save(path);
  auto back = ReferenceSpace::load(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.unique_decodings(), ref.unique_decodings());
  EXPECT_EQ(back.scorer_id(), "plogp");
  EXPECT_EQ(back.tokens(), 6);
  ASSERT_EQ(back.ranking().size(), ref.ranking().size());
  for (std::size_t i = 0; i < ref.ranking().size(); i += 97) {
    EXPECT_EQ(back.ranking()[i].canonical, ref.ranking()[i].canonical);
    EXPECT_EQ(back.ranking()[i].score, ref.ranking()[i].score);
    EXPECT_EQ(back.ranking()[i].bits, ref.ranking()[i].bits);
  }
}

TEST(ReferenceSpaceTest, CacheIsKeyedByScorer) {
  auto path = std::filesystem::temp_directory_path() / "qevo_ref_cache.ref";
  std::filesystem::remove(path);
  auto a = enumerate_cached(vocab3(), 6, plogp(), path);
  auto b = enumerate_cached(vocab3(), 6, Scorer(ScorerSpec::parse("drug")), path);
  std::filesystem::remove(path);
  EXPECT_EQ(a.scorer_id(), "plogp");
  EXPECT_EQ(b.scorer_id(), ScorerSpec::parse("drug").id());
  EXPECT_EQ(a.unique_decodings(), b.unique_decodings());
}

TEST(ReferenceSpaceTest, OversizedSpaceIsRejected) {
  try {
    enumerate(codec::TokenVocabulary::preset("table_2_4"), 7, plogp());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SpaceTooLarge);
  }
}

}  // namespace
}  // namespace qevo

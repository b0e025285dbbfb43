#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include "golden.hpp"
#include "qevo/crippen.hpp"
#include "qevo/error.hpp"
#include "qevo/fingerprint.hpp"
#include "qevo/qed.hpp"
#include "qevo/sa_score.hpp"
#include "qevo/selfies_decoder.hpp"

namespace qevo::chem {
namespace {

using Counts = std::map<std::uint32_t, int>;

// Identifiers from RDKit's Morgan generator, radius 2, default invariants.
TEST(Morgan, MatchesReferenceIdentifiers) {
  const std::map<std::string, Counts> expected = {
      {"[C][C][C][C][C][C]",
       {{1173125914, 2}, {1510461303, 2}, {1685248591, 2}, {2245384272, 4}, {2246728737, 2}, {3542456614, 2},
        {3745584548, 2}}},
      {"[O][C][C][=Branch1][C][=O][N]",
       {{847957139, 1}, {864662311, 1}, {864942730, 1}, {1217983889, 1}, {1510328189, 1}, {1535166686, 1},
        {2245384272, 1}, {2246699815, 1}, {2591432844, 1}, {3328145258, 1}, {4018142848, 1}}},
      {"[C][=C][C][=C][C][=C][Ring1][=Branch1][O]",
       {{26234434, 1}, {98513984, 3}, {251179073, 2}, {859799282, 1}, {864662311, 1}, {951226070, 2},
        {2763854213, 1}, {2905660137, 1}, {3217380708, 1}, {3218693969, 5}, {3999906991, 2}}},
      {"[C][C][C][N][Ring1][Ring1][C]",
       {{526926974, 1}, {1858577693, 1}, {2014255590, 1}, {2092489639, 1}, {2185212638, 1}, {2246728737, 2},
        {2811394787, 1}, {2968968094, 1}, {2976033787, 1}, {3657471097, 1}}},
      {"[C][N][C][=N][Ring1][Ring1]",
       {{1815768521, 1}, {1847643121, 1}, {2041434490, 1}, {2092489639, 1}, {2246728737, 1}, {2434389300, 1},
        {3218693969, 1}, {3657471097, 1}, {3995723101, 1}}},
  };
  for (const auto& [text, counts] : expected) {
    EXPECT_EQ(morgan_counts(selfies::decode_molecule(text), 2), counts) << text;
  }
}

TEST(Morgan, SingleAtomHasOnlyRadiusZero) {
  const auto c = morgan_counts(selfies::decode_molecule("[C]"), 2);
  EXPECT_EQ(c, (Counts{{2246733040, 1}}));
}

TEST(SaScore, FragmentTableLookups) {
  EXPECT_EQ(sa_fragment_score(0), -4.0);
  // The methyl environment is the most common fragment in the reference set.
  EXPECT_GT(sa_fragment_score(2246728737), 0.0);
}

void check_golden_sas(int k) {
  auto vocab = codec::TokenVocabulary::preset("table_2_3");
  const auto rows = qevo::testing::load_logp_golden(k);
  ASSERT_FALSE(rows.empty());
  int off = 0;
  double worst = 0.0;
  std::string first;
  for (const auto& r : rows) {
    const double d = std::abs(sa_score(selfies::decode_bitstring(r.bits, vocab)) - r.sas);
    worst = std::max(worst, d);
    if (d > 1e-6 && off++ == 0) first = r.bits + " " + r.smiles;
  }
  EXPECT_EQ(off, 0) << "worst " << worst << ", first " << first;
}

TEST(SaScore, GoldenSixToken) { check_golden_sas(6); }

TEST(SaScore, GoldenSevenToken) { check_golden_sas(7); }

TEST(SaScore, RingAndStereoProbes) {
  std::ifstream in(qevo::testing::golden_dir() / "sa_probe.golden");
  ASSERT_TRUE(in);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("selfies,", 0) == 0) continue;
    const auto c = qevo::testing::split_csv(line);
    ASSERT_EQ(c.size(), 8u) << line;
    const auto g = selfies::decode_molecule(c[0]);
    ASSERT_TRUE(g.valid()) << c[1];
    const auto t = sa_terms(g);
    EXPECT_NEAR(crippen_logp(g), std::stod(c[2]), 1e-4) << c[1];
    EXPECT_NEAR(qed(g), std::stod(c[3]), 1e-6) << c[1];
    EXPECT_NEAR(sa_score(g), std::stod(c[4]), 1e-6) << c[1];
    EXPECT_EQ(t.stereo_centers, std::stoi(c[5])) << c[1];
    EXPECT_EQ(t.spiro, std::stoi(c[6])) << c[1];
    EXPECT_EQ(t.bridgeheads, std::stoi(c[7])) << c[1];
    ++n;
  }
  EXPECT_GE(n, 20);
}

TEST(SaScore, InvalidGraphThrows) {
  EXPECT_THROW(sa_score(MoleculeGraph::invalid("empty")), Error);
}

}  // namespace
}  // namespace qevo::chem

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>

#include "golden.hpp"
#include "qevo/error.hpp"
#include "qevo/qed.hpp"
#include "qevo/selfies_decoder.hpp"
#include "qevo/smarts.hpp"

namespace qevo::chem {
namespace {

smarts::Graph view(const char* selfies_text, bool explicit_h = false) {
  return smarts::Graph(selfies::decode_molecule(selfies_text), explicit_h);
}

TEST(Smarts, AtomPrimitives) {
  const auto ethanol = view("[C][C][O]");
  EXPECT_EQ(smarts::Pattern("[OH1]").count_unique(ethanol), 1);
  EXPECT_EQ(smarts::Pattern("[CH3]").count_unique(ethanol), 1);
  EXPECT_EQ(smarts::Pattern("[CX4]").count_unique(ethanol), 2);
  EXPECT_EQ(smarts::Pattern("[CD2]").count_unique(ethanol), 1);
  EXPECT_EQ(smarts::Pattern("[#6;!H3]").count_unique(ethanol), 1);
  EXPECT_EQ(smarts::Pattern("[O;v2;+0]").count_unique(ethanol), 1);
  EXPECT_EQ(smarts::Pattern("[C,O]").count_unique(ethanol), 3);
  EXPECT_EQ(smarts::Pattern("[R]").count_unique(ethanol), 0);
  EXPECT_EQ(smarts::Pattern("*").count_unique(ethanol), 3);
  EXPECT_FALSE(smarts::Pattern("[13C]").matches(ethanol));
  EXPECT_FALSE(smarts::Pattern("[Cl,Hg,Si]").matches(ethanol));
}

TEST(Smarts, RingsRecursionAndComponents) {
  const auto benzene = view("[C][=C][C][=C][C][=C][Ring1][=Branch1]");
  EXPECT_EQ(smarts::Pattern("c1ccccc1").count_unique(benzene), 1);
  EXPECT_EQ(smarts::Pattern("[cR1r6]").count_unique(benzene), 6);
  EXPECT_EQ(smarts::Pattern("c:c").count_unique(benzene), 6);
  EXPECT_FALSE(smarts::Pattern("c-c").matches(benzene));
  EXPECT_FALSE(smarts::Pattern("c!@c").matches(benzene));
  EXPECT_TRUE(smarts::Pattern("c~c").matches(benzene));

  const auto chain = view("[C][C][C][C][O]");
  EXPECT_EQ(smarts::Pattern("[$(CO)]").count_unique(chain), 1);
  EXPECT_EQ(smarts::Pattern("[C;!$(CO)]").count_unique(chain), 3);
  EXPECT_EQ(smarts::Pattern("C.O").count_unique(chain), 4);
  EXPECT_FALSE(smarts::Pattern("O.O").matches(chain));
  EXPECT_EQ(smarts::Pattern("[R0;D2][R0;D2][R0;D2]").count_unique(chain), 1);

  const auto ring = view("[C][C][C][C][C][Ring1][Branch1]");
  EXPECT_EQ(smarts::Pattern("C1CCCC1").count_unique(ring), 1);
  EXPECT_EQ(smarts::Pattern("C@C").count_unique(ring), 5);
}

TEST(Smarts, ExplicitHydrogenView) {
  const auto methane = view("[C]", true);
  EXPECT_EQ(methane.atom_count(), 5);
  EXPECT_EQ(smarts::Pattern("[#1][#6]").count_unique(methane), 4);
  EXPECT_EQ(smarts::Pattern("[CH4]").count_unique(methane), 1);
  EXPECT_EQ(smarts::Pattern("[CX4D4]").count_unique(methane), 1);
}

TEST(Smarts, MalformedPatternsThrow) {
  for (const char* bad : {"", "[C", "C(", "C1CC", "C=", "[$(C]", "[Q]", "C..C"}) {
    EXPECT_THROW(smarts::Pattern{bad}, Error) << bad;
  }
}

void check_golden_qed(int k) {
  auto vocab = codec::TokenVocabulary::preset("table_2_3");
  auto rows = qevo::testing::load_qed_golden(k);
  ASSERT_FALSE(rows.empty());
  std::map<std::string, int> off;
  std::map<std::string, std::string> first;
  auto flag = [&](bool bad, const char* what, const std::string& bits) {
    if (!bad) return;
    if (off[what]++ == 0) first[what] = bits;
  };
  double worst_qed = 0.0;
  for (const auto& r : rows) {
    auto g = selfies::decode_bitstring(r.bits, vocab);
    ASSERT_TRUE(g.valid()) << r.bits;
    const auto p = qed_properties(g);
    flag(std::abs(p.mw - r.mw) > 1e-3, "mw", r.bits);
    flag(std::abs(p.alogp - r.alogp) > 1e-4, "alogp", r.bits);
    flag(p.hba != r.hba, "hba", r.bits);
    flag(p.hbd != r.hbd, "hbd", r.bits);
    flag(std::abs(p.psa - r.psa) > 1e-3, "psa", r.bits);
    flag(p.rotb != r.rotb, "rotb", r.bits);
    flag(p.arom != r.arom, "arom", r.bits);
    flag(p.alerts != r.alerts, "alerts", r.bits);
    const double d = std::abs(qed(p) - r.qed);
    worst_qed = std::max(worst_qed, d);
    flag(d > 1e-5, "qed", r.bits);
  }
  for (const auto& [what, n] : off) ADD_FAILURE() << what << ": " << n << " of " << rows.size() << " rows differ, first " << first[what];
  EXPECT_LT(worst_qed, 1e-5);
}

TEST(Qed, GoldenSixTokenProperties) { check_golden_qed(6); }

TEST(Qed, GoldenSevenTokenProperties) { check_golden_qed(7); }

TEST(Qed, InvalidGraph) {
  EXPECT_EQ(qed(MoleculeGraph::invalid("empty")), 0.0);
  EXPECT_THROW(qed_properties(MoleculeGraph::invalid("empty")), Error);
}

}  // namespace
}  // namespace qevo::chem

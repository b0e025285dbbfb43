#include <gtest/gtest.h>

#include <set>

#include "qevo/rng.hpp"

namespace qevo {
namespace {

TEST(Philox, KnownAnswerVectors) {
  using B = Philox::Block;
  EXPECT_EQ(Philox::generate(B{0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, SameSeedSameSequence) {
  Philox a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Philox, StreamsDiffer) {
  Philox a(42, 0), b(42, 1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    seen.insert(a());
    seen.insert(b());
  }
  EXPECT_EQ(seen.size(), 200u);
}

TEST(Philox, UniformAndBelowStayInRange) {
  Philox g(3);
  for (int i = 0; i < 10000; ++i) {
    double u = g.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(g.below(7), 7u);
    int r = g.rademacher();
    ASSERT_TRUE(r == 1 || r == -1);
  }
}

}  // namespace
}  // namespace qevo

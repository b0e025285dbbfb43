#include <gtest/gtest.h>

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "qevo/error.hpp"
#include "qevo/token_codec.hpp"

namespace qevo::codec {
namespace {

using Table = std::vector<std::pair<std::string, std::string>>;

const Table kThreeBit = {
    {"[C]", "000"},     {"[O]", "001"},  {"[N]", "010"},     {"[F]", "011"},
    {"[=C]", "100"},    {"[#N]", "101"}, {"[Ring1]", "110"}, {"[Branch1]", "111"},
};

const Table kFourBit = {
    {"[C]", "0000"},       {"[=C]", "1000"},     {"[#C]", "0100"},      {"[O]", "0010"},
    {"[=O]", "0001"},      {"[N]", "1100"},      {"[=N]", "0011"},      {"[#N]", "0110"},
    {"[F]", "1001"},       {"[Cl]", "1010"},     {"[Ring1]", "0101"},   {"[Ring2]", "1110"},
    {"[Branch1]", "0111"}, {"[=Branch1]", "1101"}, {"[Branch2]", "1011"}, {"[=Branch2]", "1111"},
};

void expect_table(const TokenVocabulary& v, const Table& table, int width) {
  EXPECT_EQ(v.bits_per_token(), width);
  EXPECT_EQ(v.size(), table.size());
  for (const auto& [token, bits] : table) {
    std::vector<std::string> one{token};
    EXPECT_EQ(encode_tokens(one, v).bits, bits) << token;
    EXPECT_EQ(decode_bits(bits, v), one) << bits;
  }
}

TEST(TokenCodec, ThreeBitPresetMatchesTable) { expect_table(TokenVocabulary::preset("table_2_3"), kThreeBit, 3); }

TEST(TokenCodec, FourBitPresetMatchesTable) { expect_table(TokenVocabulary::preset("table_2_4"), kFourBit, 4); }

TEST(TokenCodec, LeftmostBitIsMostSignificant) {
  auto v = TokenVocabulary::preset("table_2_3");
  EXPECT_EQ(v.code_of("[#N]"), 5u);
  EXPECT_EQ(v.code_string(5), "101");
  EXPECT_EQ(decode_codes("101000", 3), (std::vector<std::uint32_t>{5, 0}));
}

TEST(TokenCodec, ExhaustiveSixTokenRoundTrip) {
  auto v = TokenVocabulary::preset("table_2_3");
  auto start = std::chrono::steady_clock::now();
  std::string bits(18, '0');
  std::size_t mismatches = 0;
  for (std::uint32_t x = 0; x < (1u << 18); ++x) {
    for (int i = 0; i < 18; ++i) bits[i] = ((x >> (17 - i)) & 1u) ? '1' : '0';
    auto tokens = decode_bits(bits, v);
    if (tokens.size() != 6 || encode_tokens(tokens, v, 6).bits != bits) ++mismatches;
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(mismatches, 0u);
  EXPECT_LT(seconds, 1.0);
}

TEST(TokenCodec, UnknownTokenIsRejected) {
  auto v = TokenVocabulary::preset("table_2_3");
  std::vector<std::string> tokens{"[C]", "[Cl]"};
  try {
    encode_tokens(tokens, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownToken);
  }
}

TEST(TokenCodec, LengthMismatchIsRejected) {
  auto v = TokenVocabulary::preset("table_2_3");
  std::vector<std::string> tokens{"[C]", "[C]"};
  try {
    encode_tokens(tokens, v, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
  try {
    decode_bits("0000", v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
}

TEST(TokenCodec, TextFormatRoundTrips) {
  auto v = TokenVocabulary::preset("table_2_4");
  auto back = TokenVocabulary::parse(v.to_text(), "copy");
  EXPECT_EQ(back.tokens_by_code(), v.tokens_by_code());
  EXPECT_EQ(back.bits_per_token(), 4);
}

TEST(TokenCodec, IncompleteVocabularyIsRejected) {
  EXPECT_THROW(TokenVocabulary::parse("[C]=00\n[O]=01\n[N]=10\n"), Error);
  EXPECT_THROW(TokenVocabulary::parse("[C]=00\n[O]=01\n[N]=10\n[F]=10\n"), Error);
}

TEST(TokenCodec, SplitsAndJoinsSelfies) {
  auto tokens = split_selfies("[C][=C][Ring1][#N]");
  EXPECT_EQ(tokens, (std::vector<std::string>{"[C]", "[=C]", "[Ring1]", "[#N]"}));
  EXPECT_EQ(join_selfies(tokens), "[C][=C][Ring1][#N]");
}

}  // namespace
}  // namespace qevo::codec

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qevo::codec {

/// Bijection between SELFIES tokens and fixed-width bit codes.
///
/// The leftmost character of a code string is its most significant bit and
/// maps to the first qubit of the token's block, so "101" is code 5.
class TokenVocabulary {
 public:
  /// Builds a vocabulary from (token, bitcode) pairs. Every code of the
  /// common width must appear exactly once.
  static TokenVocabulary from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs,
      std::string name = "custom");

  /// Parses the `token=bitcode` line format; '#' starts a comment.
  static TokenVocabulary parse(std::string_view text, std::string name = "custom");
  static TokenVocabulary load(const std::filesystem::path& path);

  /// Built-in presets `table_2_3` and `table_2_4`.
  static TokenVocabulary preset(std::string_view name);
  static bool is_preset(std::string_view name);

  /// Resolves either a preset name or a path to a vocabulary file.
  static TokenVocabulary resolve(std::string_view name_or_path);

  int bits_per_token() const noexcept { return bits_; }
  std::size_t size() const noexcept { return by_code_.size(); }
  const std::string& name() const noexcept { return name_; }

  bool contains(std::string_view token) const;
  std::uint32_t code_of(std::string_view token) const;
  const std::string& token_of(std::uint32_t code) const;
  std::string code_string(std::uint32_t code) const;

  /// Tokens indexed by code.
  const std::vector<std::string>& tokens_by_code() const noexcept { return by_code_; }

  /// Serialises back to the `token=bitcode` format, one line per code.
  std::string to_text() const;

 private:
  std::string name_;
  int bits_ = 0;
  std::vector<std::string> by_code_;
  std::unordered_map<std::string, std::uint32_t> by_token_;
};

/// Concatenated token codes; bits[0] is qubit 0.
struct MoleculeBitstring {
  std::string bits;
  int bits_per_token = 1;

  std::size_t token_count() const noexcept { return bits.size() / bits_per_token; }
  bool operator==(const MoleculeBitstring&) const = default;
};

MoleculeBitstring encode_tokens(std::span<const std::string> tokens,
                                const TokenVocabulary& vocab, std::size_t expected_length);
MoleculeBitstring encode_tokens(std::span<const std::string> tokens,
                                const TokenVocabulary& vocab);

std::vector<std::string> decode_bits(std::string_view bits, const TokenVocabulary& vocab);
std::vector<std::string> decode_bits(const MoleculeBitstring& bits, const TokenVocabulary& vocab);

/// Token codes of a bitstring, one entry per block.
std::vector<std::uint32_t> decode_codes(std::string_view bits, int bits_per_token);

/// Splits "[C][=C][Ring1]" into its bracketed tokens.
std::vector<std::string> split_selfies(std::string_view selfies);
std::string join_selfies(std::span<const std::string> tokens);

}  // namespace qevo::codec

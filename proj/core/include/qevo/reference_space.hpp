#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "qevo/scorer.hpp"
#include "qevo/token_codec.hpp"

namespace qevo {

struct ReferenceEntry {
  std::string canonical;
  double score = 0.0;
  std::uint64_t multiplicity = 0;
  std::string bits;  // smallest bitstring decoding to this molecule
};

/// Every molecule reachable with k tokens, ranked by score (ascending, ties
/// by canonical form). Invalid decodings only enter the multiplicity count.
class ReferenceSpace {
 public:
  ReferenceSpace() = default;
  ReferenceSpace(std::string vocabulary, int k, int bits_per_token, std::string scorer_id,
                 std::vector<ReferenceEntry> entries, std::uint64_t invalid_multiplicity);

  const std::string& vocabulary() const noexcept { return vocabulary_; }
  int tokens() const noexcept { return k_; }
  int bits_per_token() const noexcept { return bits_per_token_; }
  const std::string& scorer_id() const noexcept { return scorer_id_; }

  /// Valid molecules in rank order.
  const std::vector<ReferenceEntry>& ranking() const noexcept { return entries_; }
  std::size_t unique_valid() const noexcept { return entries_.size(); }
  /// Distinct decodings including the empty one, when it occurs.
  std::size_t unique_decodings() const noexcept { return entries_.size() + (invalid_multiplicity_ > 0 ? 1 : 0); }
  std::uint64_t invalid_multiplicity() const noexcept { return invalid_multiplicity_; }
  std::uint64_t total_multiplicity() const noexcept;

  /// First min(n, size) entries.
  std::vector<ReferenceEntry> top_k(std::size_t n) const;
  /// Zero-based rank, or -1 when absent.
  long rank_of(const std::string& canonical) const;
  const ReferenceEntry* find(const std::string& canonical) const;

  void save(const std::filesystem::path& path) const;
  static ReferenceSpace load(const std::filesystem::path& path);
  /// rank,canonical,score,multiplicity,bits for the first top_n entries.
  void write_csv(const std::filesystem::path& path, std::size_t top_n) const;

 private:
  void index();

  std::string vocabulary_;
  int k_ = 0;
  int bits_per_token_ = 0;
  std::string scorer_id_;
  std::vector<ReferenceEntry> entries_;
  std::uint64_t invalid_multiplicity_ = 0;
  std::unordered_map<std::string, std::size_t> rank_;
};

/// Largest k * bits_per_token accepted by enumerate().
inline constexpr int kMaxEnumerationBits = 27;

/// Decodes all 2^(k*n) bitstrings. Sequences that stop reading tokens
/// early are counted in blocks, so the work grows with the number of
/// distinct token prefixes rather than 2^(k*n). Throws SpaceTooLarge.
ReferenceSpace enumerate(const codec::TokenVocabulary& vocab, int k, const Scorer& scorer);

/// Loads `cache` when it matches (vocabulary, k, scorer); otherwise
/// enumerates and writes it.
ReferenceSpace enumerate_cached(const codec::TokenVocabulary& vocab, int k, const Scorer& scorer,
                                const std::filesystem::path& cache);

}  // namespace qevo

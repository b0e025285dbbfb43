#pragma once

#include <deque>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "qevo/quantum_sampler.hpp"
#include "qevo/scorer.hpp"
#include "qevo/selfies_decoder.hpp"
#include "qevo/token_codec.hpp"

namespace qevo {

/// One decoded, scored molecule. Invalid decodings share the empty
/// canonical form.
struct ScoredMolecule {
  std::string canonical;
  double score = chem::kInvalidPenalty;
  bool valid = false;
};

/// Bitstring -> scored molecule, scoring each canonical form once. Safe for
/// concurrent lookups; inserts are idempotent.
class ScoreCache {
 public:
  ScoreCache(codec::TokenVocabulary vocab, Scorer scorer);

  const ScoredMolecule& lookup(std::string_view bits);

  const codec::TokenVocabulary& vocabulary() const noexcept { return vocab_; }
  const Scorer& scorer() const noexcept { return scorer_; }
  /// Number of scorer calls so far (one per canonical form).
  std::size_t scored() const;

 private:
  codec::TokenVocabulary vocab_;
  selfies::SymbolTable table_;
  Scorer scorer_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, const ScoredMolecule*> by_bits_;
  std::unordered_map<std::string, const ScoredMolecule*> by_canonical_;
  std::deque<ScoredMolecule> storage_;
};

/// Form of the purity regulariser.
/// `OneMinusSum`: lambda * (1 - sum w^2), zero for a pure ensemble.
/// `NegativeSum`: -lambda * sum w^2; same argmin, shifted by lambda.
enum class RegForm { OneMinusSum, NegativeSum };

RegForm parse_reg_form(std::string_view s);
std::string_view to_string(RegForm f) noexcept;

struct LossConfig {
  double p0 = 0.0;
  double lambda = 0.0;
  RegForm reg_form = RegForm::OneMinusSum;
};

struct EnsembleStats {
  std::map<std::string, double> weights;
  double p_m = 0.0;
  double purity = 0.0;
  double sum_sq_weights = 0.0;
  double loss = 0.0;
  std::size_t unique_count = 0;
};

/// Eq. 4: sum_i (N_i / N) p_i.
double ensemble_average(const sim::SampleHistogram& hist, ScoreCache& cache);
/// Eq. 7: 1 - unique / shots.
double purity(const sim::SampleHistogram& hist);
/// Eq. 3 with the configured regulariser, plus every statistic above.
EnsembleStats total_loss(const sim::SampleHistogram& hist, const LossConfig& cfg, ScoreCache& cache);

}  // namespace qevo

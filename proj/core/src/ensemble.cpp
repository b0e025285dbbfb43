#include "qevo/ensemble.hpp"

#include <cmath>
#include <mutex>

#include "qevo/canonical.hpp"
#include "qevo/error.hpp"

namespace qevo {

ScoreCache::ScoreCache(codec::TokenVocabulary vocab, Scorer scorer)
    : vocab_(std::move(vocab)), table_(vocab_), scorer_(std::move(scorer)) {}

std::size_t ScoreCache::scored() const {
  std::shared_lock lock(mutex_);
  return storage_.size();
}

const ScoredMolecule& ScoreCache::lookup(std::string_view bits) {
  const std::string key(bits);
  {
    std::shared_lock lock(mutex_);
    if (auto it = by_bits_.find(key); it != by_bits_.end()) return *it->second;
  }
  if (bits.size() % vocab_.bits_per_token() != 0) {
    throw Error(Errc::LengthMismatch, "bitstring length is not a multiple of the token width");
  }
  const auto codes = codec::decode_codes(bits, vocab_.bits_per_token());
  thread_local selfies::Decoder decoder;
  thread_local selfies::RawGraph raw;
  decoder.decode(codes, table_, raw);
  const auto g = selfies::finalize(raw);
  ScoredMolecule mol;
  if (g.valid()) {
    mol.canonical = chem::canonicalize(g).text;
    mol.valid = true;
  }

  std::unique_lock lock(mutex_);
  if (auto it = by_bits_.find(key); it != by_bits_.end()) return *it->second;
  auto found = by_canonical_.find(mol.canonical);
  if (found == by_canonical_.end()) {
    // Scoring under the lock keeps the "once per canonical form" guarantee.
    const auto score = scorer_(g);
    mol.score = score.value;
    mol.valid = score.valid;
    storage_.push_back(std::move(mol));
    found = by_canonical_.emplace(storage_.back().canonical, &storage_.back()).first;
  }
  by_bits_.emplace(key, found->second);
  return *found->second;
}

RegForm parse_reg_form(std::string_view s) {
  if (s == "one_minus_sum") return RegForm::OneMinusSum;
  if (s == "negative_sum") return RegForm::NegativeSum;
  throw Error(Errc::InvalidConfig, "unknown reg_form '" + std::string(s) + "'");
}

std::string_view to_string(RegForm f) noexcept {
  return f == RegForm::OneMinusSum ? "one_minus_sum" : "negative_sum";
}

double ensemble_average(const sim::SampleHistogram& hist, ScoreCache& cache) {
  if (hist.shots < 1) throw Error(Errc::InvalidConfig, "histogram has no shots");
  const double n = static_cast<double>(hist.shots);
  double sum = 0.0;
  for (const auto& [bits, count] : hist.counts) sum += static_cast<double>(count) / n * cache.lookup(bits).score;
  return sum;
}

double purity(const sim::SampleHistogram& hist) {
  if (hist.shots < 1) throw Error(Errc::InvalidConfig, "histogram has no shots");
  return 1.0 - static_cast<double>(hist.unique_count()) / static_cast<double>(hist.shots);
}

EnsembleStats total_loss(const sim::SampleHistogram& hist, const LossConfig& cfg, ScoreCache& cache) {
  if (cfg.lambda < 0) throw Error(Errc::InvalidConfig, "lambda must be nonnegative");
  EnsembleStats st;
  st.p_m = ensemble_average(hist, cache);
  st.purity = purity(hist);
  st.unique_count = hist.unique_count();
  const double n = static_cast<double>(hist.shots);
  for (const auto& [bits, count] : hist.counts) {
    const double w = static_cast<double>(count) / n;
    st.weights.emplace(bits, w);
    st.sum_sq_weights += w * w;
  }
  const double reg = cfg.reg_form == RegForm::OneMinusSum ? cfg.lambda * (1.0 - st.sum_sq_weights)
                                                          : -cfg.lambda * st.sum_sq_weights;
  st.loss = std::abs(st.p_m - cfg.p0) + reg;
  if (!std::isfinite(st.loss)) throw Error(Errc::NonFiniteLoss, "ensemble loss is not finite");
  return st;
}

}  // namespace qevo

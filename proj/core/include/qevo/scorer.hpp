#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "qevo/chem_props.hpp"

namespace qevo {

/// Named property scorer as written in run configs: `plogp` or
/// `drug{alpha,beta,gamma,ref}` (trailing fields may be omitted).
struct ScorerSpec {
  enum class Kind { PLogP, Drug };
  Kind kind = Kind::PLogP;
  chem::LossWeights weights;
  std::string reference;  // SELFIES of the similarity reference
  chem::LargeRingBranch branch = chem::LargeRingBranch::Literal;

  static ScorerSpec parse(std::string_view text);
  /// Stable identifier; two scorers with equal ids give equal scores.
  std::string id() const;
};

/// Callable molecule scorer. Lower is better.
class Scorer {
 public:
  using Fn = std::function<chem::PropertyScore(const chem::MoleculeGraph&)>;

  explicit Scorer(const ScorerSpec& spec);
  Scorer(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}

  chem::PropertyScore operator()(const chem::MoleculeGraph& g) const { return fn_(g); }
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
  Fn fn_;
};

}  // namespace qevo

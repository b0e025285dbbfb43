#pragma once

#include <optional>

#include "qevo/crippen.hpp"
#include "qevo/fingerprint.hpp"
#include "qevo/molecule.hpp"

namespace qevo::chem {

/// Loss value of one molecule. Invalid molecules score the penalty 1.0.
struct PropertyScore {
  double value = 1.0;
  bool valid = false;
};

inline constexpr double kInvalidPenalty = 1.0;

struct LossWeights {
  double alpha = 2.0;
  double beta = 1.0;
  double gamma = 0.0;
};

/// Which constant the drug-likeness term uses.
/// `Literal`: 1.0 - QED when a ring exceeds 7 atoms, otherwise 1.2 - QED.
/// `Penalize`: the reverse, so large rings cost the extra 0.2.
enum class LargeRingBranch { Literal, Penalize };

/// plogP loss: -logP for valid molecules, 1.0 otherwise.
PropertyScore plogp_loss(const MoleculeGraph& g);

bool has_large_ring(const MoleculeGraph& g);

/// Constant minus QED.
double drug_term_a(const MoleculeGraph& g, LargeRingBranch branch = LargeRingBranch::Literal);
/// Synthetic accessibility score divided by 10; 1.0 for the invalid graph.
double drug_term_b(const MoleculeGraph& g);
double drug_term_c(const MoleculeGraph& g, const Fingerprint& ref);

/// (alpha*a + beta*b + gamma*c) / (alpha + beta + gamma); 1.0 for invalid
/// molecules. Throws MissingReference when gamma > 0 and `ref` is empty.
PropertyScore drug_design_loss(const MoleculeGraph& g, const LossWeights& w,
                               const std::optional<Fingerprint>& ref,
                               LargeRingBranch branch = LargeRingBranch::Literal);

}  // namespace qevo::chem

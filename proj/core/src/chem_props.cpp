#include "qevo/chem_props.hpp"

#include "qevo/error.hpp"
#include "qevo/qed.hpp"
#include "qevo/rings.hpp"
#include "qevo/sa_score.hpp"

namespace qevo::chem {

PropertyScore plogp_loss(const MoleculeGraph& g) {
  if (!g.valid()) return {kInvalidPenalty, false};
  return {-crippen_logp(g), true};
}

bool has_large_ring(const MoleculeGraph& g) { return g.valid() && find_rings(g).max_ring_size() > 7; }

double drug_term_a(const MoleculeGraph& g, LargeRingBranch branch) {
  const bool large = has_large_ring(g);
  const bool low_constant = branch == LargeRingBranch::Literal ? large : !large;
  return (low_constant ? 1.0 : 1.2) - qed(g);
}

double drug_term_b(const MoleculeGraph& g) { return g.valid() ? sa_score(g) / 10.0 : 1.0; }

double drug_term_c(const MoleculeGraph& g, const Fingerprint& ref) {
  return 1.0 - tanimoto(fingerprint(g, ref.radius, ref.width), ref);
}

PropertyScore drug_design_loss(const MoleculeGraph& g, const LossWeights& w, const std::optional<Fingerprint>& ref,
                               LargeRingBranch branch) {
  if (w.alpha < 0 || w.beta < 0 || w.gamma < 0 || w.alpha + w.beta + w.gamma <= 0) {
    throw Error(Errc::InvalidConfig, "loss weights must be nonnegative with a positive sum");
  }
  if (w.gamma > 0 && !ref) throw Error(Errc::MissingReference, "gamma > 0 requires a reference molecule");
  if (!g.valid()) return {kInvalidPenalty, false};
  double num = w.alpha * drug_term_a(g, branch) + w.beta * drug_term_b(g);
  if (w.gamma > 0) num += w.gamma * drug_term_c(g, *ref);
  return {num / (w.alpha + w.beta + w.gamma), true};
}

}  // namespace qevo::chem

#pragma once

#include <cstdint>

#include "qevo/molecule.hpp"

namespace qevo::chem {

/// Components of the synthetic accessibility score.
struct SaTerms {
  double fragment = 0.0;  // mean fragment contribution over Morgan radius-2 environments
  int atoms = 0;
  int stereo_centers = 0;  // potential tetrahedral centres, assigned or not
  int spiro = 0;
  int bridgeheads = 0;
  int macrocycles = 0;  // rings with more than 8 atoms
  int environments = 0;  // distinct environment identifiers
};

SaTerms sa_terms(const MoleculeGraph& g);

/// Synthetic accessibility score in [1, 10] (1 easy, 10 hard) from fragment
/// contributions and complexity penalties, matching RDKit's SA_Score
/// contribution. Throws InvalidMolecule for the invalid graph.
double sa_score(const MoleculeGraph& g);

/// Contribution of one Morgan environment identifier; -4 when unknown.
double sa_fragment_score(std::uint32_t id);

}  // namespace qevo::chem

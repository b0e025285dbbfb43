#pragma once

#include <string>

#include "qevo/molecule.hpp"

namespace qevo::chem {

/// Deterministic SMILES-like text, identical for isomorphic graphs.
struct CanonicalForm {
  std::string text;
  bool operator==(const CanonicalForm&) const = default;
  auto operator<=>(const CanonicalForm&) const = default;
};

/// Throws InvalidMolecule for the Invalid graph.
CanonicalForm canonicalize(const MoleculeGraph& g);

/// Iterative neighbourhood refinement of atom classes; equal values mean the
/// atoms could not be told apart. Exposed for fingerprinting and tests.
std::vector<int> refine_classes(const MoleculeGraph& g);

}  // namespace qevo::chem

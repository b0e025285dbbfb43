#pragma once

#include <vector>

#include "qevo/molecule.hpp"

namespace qevo::chem {

struct RingInfo {
  /// Relevant cycles (cycles not expressible through strictly shorter
  /// ones), each as an ordered walk of atom indices. Sorted by size.
  std::vector<std::vector<int>> atom_rings;
  std::vector<std::vector<int>> bond_rings;
  std::vector<char> bond_in_ring;
  std::vector<char> atom_in_ring;
  /// Cyclomatic number, i.e. the SSSR size.
  int cycle_rank = 0;

  int max_ring_size() const noexcept;
};

RingInfo find_rings(const MoleculeGraph& g);

/// Hückel aromaticity on the Kekulé graph with the donor-type model used by
/// common cheminformatics toolkits (single rings, then fused combinations).
/// Sets `aromatic` on atoms and ring bonds; Kekulé orders are kept.
void perceive_aromaticity(MoleculeGraph& g, const RingInfo& rings);

}  // namespace qevo::chem

#pragma once

#include <string>
#include <vector>

#include "qevo/molecule.hpp"

namespace qevo::chem {

/// Wildman-Crippen atom type and contribution for one atom.
struct CrippenAtom {
  std::string type;
  double logp = 0.0;
};

/// Types every heavy atom and, after it, each heavy atom's hydrogens
/// (one entry per hydrogen, in heavy-atom order). Throws
/// UnsupportedAtomClass if an atom matches no implemented type.
std::vector<CrippenAtom> crippen_types(const MoleculeGraph& g);

/// Sum of atom contributions including hydrogens.
double crippen_logp(const MoleculeGraph& g);

}  // namespace qevo::chem

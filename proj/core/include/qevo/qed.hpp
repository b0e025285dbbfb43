#pragma once

#include "qevo/molecule.hpp"

namespace qevo::chem {

/// Inputs of the quantitative estimate of drug-likeness, computed on the
/// hydrogen-suppressed graph as in RDKit's QED module.
struct QedProperties {
  double mw = 0.0;     // average molecular weight
  double alogp = 0.0;  // Crippen logP
  int hba = 0;         // acceptor pattern matches, summed over patterns
  int hbd = 0;         // Lipinski-style donors
  double psa = 0.0;    // topological polar surface area over N and O
  int rotb = 0;        // rotatable bonds, strict definition
  int arom = 0;        // rings left after removing aliphatic ring atoms bonded to non-aromatic atoms
  int alerts = 0;      // structural alert patterns that match
};

/// Throws InvalidMolecule for the invalid graph.
QedProperties qed_properties(const MoleculeGraph& g);

double tpsa(const MoleculeGraph& g);

/// Weighted QED with the mean weight set, in (0, 1).
double qed(const QedProperties& p);

/// 0 for the invalid graph.
double qed(const MoleculeGraph& g);

}  // namespace qevo::chem

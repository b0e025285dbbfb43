#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qevo/molecule.hpp"

namespace qevo::chem {

/// Folded circular fingerprint.
struct Fingerprint {
  int width = 1024;
  int radius = 3;
  std::vector<std::uint64_t> words;

  bool test(int bit) const { return (words[static_cast<std::size_t>(bit) / 64] >> (bit % 64)) & 1u; }
  int popcount() const;
  bool operator==(const Fingerprint&) const = default;
};

/// ECFP-style environments of radius 0..`radius`, hashed with 64-bit FNV-1a
/// and folded modulo `width`.
Fingerprint fingerprint(const MoleculeGraph& g, int radius = 3, int width = 1024);

/// Unfolded Morgan environment counts up to `radius`, keyed by 32-bit
/// identifiers that match RDKit's Morgan generator with its default
/// connectivity invariants. Environments that cover the same bond set as an
/// earlier one are dropped.
std::map<std::uint32_t, int> morgan_counts(const MoleculeGraph& g, int radius = 2);

/// |a & b| / |a | b|; 1 when both are empty. Throws WidthMismatch.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

std::uint64_t fnv1a64(const void* data, std::size_t size) noexcept;

}  // namespace qevo::chem

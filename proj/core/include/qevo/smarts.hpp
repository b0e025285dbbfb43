#pragma once

#include <bitset>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qevo/molecule.hpp"
#include "qevo/rings.hpp"

namespace qevo::chem::smarts {

enum class BondKind : std::uint8_t { Single, Double, Triple, Aromatic };

/// Per-atom invariants a SMARTS primitive can test.
struct AtomView {
  int z = 0;
  bool aromatic = false;
  int charge = 0;
  int isotope = 0;
  int total_h = 0;          // H
  int implicit_h = 0;       // h
  int degree = 0;           // D, explicit connections
  int total_degree = 0;     // X, connections including implicit hydrogens
  int valence = 0;          // v
  int ring_count = 0;       // R, rings of the ring set that contain the atom
  int ring_bonds = 0;       // x
  std::uint64_t ring_sizes = 0;  // bit n set when the atom lies in a ring of size n
};

struct BondView {
  int a = 0;
  int b = 0;
  BondKind kind = BondKind::Single;
  bool in_ring = false;
};

struct Edge {
  int to;
  int bond;
};

/// Matching view of a molecule. With `explicit_h` every hydrogen becomes a
/// graph atom; hydrogens follow the heavy atoms, grouped by heavy atom.
class Graph {
 public:
  Graph(const MoleculeGraph& g, const RingInfo& rings, bool explicit_h);
  Graph(const MoleculeGraph& g, bool explicit_h);

  int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  const AtomView& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const BondView& bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  const std::vector<Edge>& edges(int i) const { return adj_[static_cast<std::size_t>(i)]; }
  /// Bond index between two atoms, or -1.
  int find_bond(int a, int b) const;
  /// Atomic numbers present in the graph.
  const std::bitset<128>& elements() const noexcept { return elements_; }

  /// Cached result of recursive query `slot` at `atom`: -1 unknown, else 0 or 1.
  /// The cache makes a Graph unsafe to share between threads during matching.
  int memo(int slot, int atom) const;
  void set_memo(int slot, int atom, bool value) const;

 private:
  std::vector<AtomView> atoms_;
  std::bitset<128> elements_;
  mutable std::vector<std::int8_t> memo_;  // slot-major, one entry per atom
  std::vector<BondView> bonds_;
  std::vector<std::vector<Edge>> adj_;
};

/// Compiled SMARTS query. Supports bracket atoms with the usual primitives
/// (element symbols, *, a, A, #n, isotope, H, h, D, X, v, R, r, x, charge,
/// $(...)), the logic operators ! & , ; in atoms and bonds, the bond
/// primitives - = # : ~ @ / \, branches, ring closures and '.' components.
/// Chirality is accepted and ignored.
class Pattern {
 public:
  /// Throws InvalidConfig on a malformed pattern.
  explicit Pattern(std::string_view smarts);
  ~Pattern();
  Pattern(Pattern&&) noexcept;
  Pattern& operator=(Pattern&&) noexcept;

  const std::string& text() const noexcept;

  bool matches(const Graph& g) const;
  /// Match with the first query atom on `atom`.
  bool matches_at(const Graph& g, int atom) const;
  /// Number of distinct matched atom sets.
  int count_unique(const Graph& g) const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace qevo::chem::smarts

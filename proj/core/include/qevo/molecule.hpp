#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qevo::chem {

enum class Element : std::uint8_t { C, N, O, F, Cl };

int atomic_number(Element e) noexcept;
/// Bonding capacity used by the decoder and for implicit hydrogens.
int max_valence(Element e) noexcept;
std::string_view symbol(Element e) noexcept;

struct Atom {
  Element element = Element::C;
  std::uint8_t hydrogens = 0;
  bool aromatic = false;
};

/// `order` is the Kekulé order (1..3); `aromatic` marks bonds inside a
/// perceived aromatic ring.
struct Bond {
  int a = 0;
  int b = 0;
  std::uint8_t order = 1;
  bool aromatic = false;
};

/// Neighbour entry of the adjacency list.
struct Neighbor {
  int atom;
  int bond;
};

/// Decoded chemical graph. An empty atom list is the Invalid graph.
class MoleculeGraph {
 public:
  MoleculeGraph() = default;
  MoleculeGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  static MoleculeGraph invalid(std::string reason);

  bool valid() const noexcept { return invalid_reason_.empty() && !atoms_.empty(); }
  const std::string& invalid_reason() const noexcept { return invalid_reason_; }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  std::vector<Atom>& mutable_atoms() noexcept { return atoms_; }
  std::vector<Bond>& mutable_bonds() noexcept { return bonds_; }

  int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  int bond_count() const noexcept { return static_cast<int>(bonds_.size()); }

  const std::vector<Neighbor>& neighbors(int atom) const { return adjacency_[static_cast<std::size_t>(atom)]; }

  /// Sum of Kekulé bond orders at an atom.
  int bond_order_sum(int atom) const;
  int heavy_degree(int atom) const { return static_cast<int>(neighbors(atom).size()); }
  int find_bond(int a, int b) const;

  /// Sets implicit hydrogens to max valence minus bond-order sum.
  void assign_implicit_hydrogens();

  /// Rebuilds adjacency after editing atoms or bonds.
  void rebuild_adjacency();

  /// Bond-connectivity check (single component).
  bool connected() const;

  /// Valence cap holds at every atom and there are no self or duplicate bonds.
  bool valence_ok() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::string invalid_reason_;
};

}  // namespace qevo::chem

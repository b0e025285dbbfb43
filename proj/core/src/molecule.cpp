#include "qevo/molecule.hpp"

#include <algorithm>

namespace qevo::chem {

int atomic_number(Element e) noexcept {
  switch (e) {
    case Element::C: return 6;
    case Element::N: return 7;
    case Element::O: return 8;
    case Element::F: return 9;
    case Element::Cl: return 17;
  }
  return 0;
}

int max_valence(Element e) noexcept {
  switch (e) {
    case Element::C: return 4;
    case Element::N: return 3;
    case Element::O: return 2;
    case Element::F:
    case Element::Cl: return 1;
  }
  return 0;
}

std::string_view symbol(Element e) noexcept {
  switch (e) {
    case Element::C: return "C";
    case Element::N: return "N";
    case Element::O: return "O";
    case Element::F: return "F";
    case Element::Cl: return "Cl";
  }
  return "?";
}

MoleculeGraph::MoleculeGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  rebuild_adjacency();
  if (atoms_.empty()) invalid_reason_ = "empty graph";
}

MoleculeGraph MoleculeGraph::invalid(std::string reason) {
  MoleculeGraph g;
  g.invalid_reason_ = std::move(reason);
  return g;
}

void MoleculeGraph::rebuild_adjacency() {
  adjacency_.assign(atoms_.size(), {});
  for (int i = 0; i < static_cast<int>(bonds_.size()); ++i) {
    const auto& b = bonds_[static_cast<std::size_t>(i)];
    adjacency_[static_cast<std::size_t>(b.a)].push_back({b.b, i});
    adjacency_[static_cast<std::size_t>(b.b)].push_back({b.a, i});
  }
}

int MoleculeGraph::bond_order_sum(int atom) const {
  int s = 0;
  for (const auto& n : neighbors(atom)) s += bonds_[static_cast<std::size_t>(n.bond)].order;
  return s;
}

int MoleculeGraph::find_bond(int a, int b) const {
  for (const auto& n : neighbors(a)) {
    if (n.atom == b) return n.bond;
  }
  return -1;
}

void MoleculeGraph::assign_implicit_hydrogens() {
  for (int i = 0; i < atom_count(); ++i) {
    auto& at = atoms_[static_cast<std::size_t>(i)];
    at.hydrogens = static_cast<std::uint8_t>(std::max(0, max_valence(at.element) - bond_order_sum(i)));
  }
}

bool MoleculeGraph::connected() const {
  if (atoms_.empty()) return false;
  std::vector<char> seen(atoms_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int a = stack.back();
    stack.pop_back();
    for (const auto& n : neighbors(a)) {
      if (!seen[static_cast<std::size_t>(n.atom)]) {
        seen[static_cast<std::size_t>(n.atom)] = 1;
        ++count;
        stack.push_back(n.atom);
      }
    }
  }
  return count == atoms_.size();
}

bool MoleculeGraph::valence_ok() const {
  for (int i = 0; i < atom_count(); ++i) {
    const auto& at = atoms_[static_cast<std::size_t>(i)];
    if (bond_order_sum(i) + at.hydrogens > max_valence(at.element)) return false;
    const auto& nb = neighbors(i);
    for (std::size_t x = 0; x < nb.size(); ++x) {
      if (nb[x].atom == i) return false;
      for (std::size_t y = x + 1; y < nb.size(); ++y) {
        if (nb[x].atom == nb[y].atom) return false;
      }
    }
  }
  return true;
}

}  // namespace qevo::chem

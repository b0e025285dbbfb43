#include "qevo/rings.hpp"

#include <algorithm>
#include <bitset>
#include <numeric>

namespace qevo::chem {

namespace {

constexpr std::size_t kMaxBonds = 256;
using EdgeSet = std::bitset<kMaxBonds>;

// Exhaustive enumeration of the cycle space beyond this rank gets expensive;
// molecules from the supported vocabularies stay well below it.
constexpr int kMaxEnumeratedRank = 14;

bool edge_set_less(const EdgeSet& a, const EdgeSet& b) {
  for (std::size_t i = 0; i < kMaxBonds; ++i) {
    if (a[i] != b[i]) return b[i];
  }
  return false;
}

// Returns the ordered atom walk if `edges` forms a single simple cycle.
bool as_simple_cycle(const MoleculeGraph& g, const EdgeSet& edges, std::vector<int>& walk) {
  const int n = g.atom_count();
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  int start = -1;
  std::size_t count = 0;
  for (int b = 0; b < g.bond_count(); ++b) {
    if (!edges[static_cast<std::size_t>(b)]) continue;
    ++count;
    const auto& bd = g.bonds()[static_cast<std::size_t>(b)];
    ++deg[static_cast<std::size_t>(bd.a)];
    ++deg[static_cast<std::size_t>(bd.b)];
    start = bd.a;
  }
  for (int d : deg) {
    if (d != 0 && d != 2) return false;
  }
  walk.clear();
  int prev = -1;
  int cur = start;
  do {
    walk.push_back(cur);
    int next = -1;
    for (const auto& nb : g.neighbors(cur)) {
      if (edges[static_cast<std::size_t>(nb.bond)] && nb.atom != prev) {
        next = nb.atom;
        break;
      }
    }
    // A 2-cycle cannot occur (no duplicate bonds), so `next` always exists.
    prev = cur;
    cur = next;
  } while (cur != start && walk.size() <= count);
  return walk.size() == count;
}

// Incremental GF(2) basis with pivot elimination.
struct Gf2Basis {
  std::vector<std::pair<std::size_t, EdgeSet>> rows;

  EdgeSet reduce(EdgeSet v) const {
    for (const auto& [pivot, row] : rows) {
      if (v[pivot]) v ^= row;
    }
    return v;
  }
  bool in_span(const EdgeSet& v) const { return reduce(v).none(); }
  bool insert(const EdgeSet& v) {
    EdgeSet r = reduce(v);
    if (r.none()) return false;
    std::size_t pivot = 0;
    while (!r[pivot]) ++pivot;
    for (auto& [p, row] : rows) {
      if (row[pivot]) row ^= r;
    }
    rows.emplace_back(pivot, r);
    return true;
  }
};

std::vector<EdgeSet> fundamental_cycles(const MoleculeGraph& g) {
  const int n = g.atom_count();
  std::vector<int> parent(static_cast<std::size_t>(n), -1), parent_bond(static_cast<std::size_t>(n), -1),
      depth(static_cast<std::size_t>(n), -1);
  std::vector<char> tree_bond(static_cast<std::size_t>(g.bond_count()), 0);
  for (int root = 0; root < n; ++root) {
    if (depth[static_cast<std::size_t>(root)] >= 0) continue;
    depth[static_cast<std::size_t>(root)] = 0;
    std::vector<int> queue{root};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int a = queue[qi];
      for (const auto& nb : g.neighbors(a)) {
        if (depth[static_cast<std::size_t>(nb.atom)] < 0) {
          depth[static_cast<std::size_t>(nb.atom)] = depth[static_cast<std::size_t>(a)] + 1;
          parent[static_cast<std::size_t>(nb.atom)] = a;
          parent_bond[static_cast<std::size_t>(nb.atom)] = nb.bond;
          tree_bond[static_cast<std::size_t>(nb.bond)] = 1;
          queue.push_back(nb.atom);
        }
      }
    }
  }
  std::vector<EdgeSet> cycles;
  for (int b = 0; b < g.bond_count(); ++b) {
    if (tree_bond[static_cast<std::size_t>(b)]) continue;
    EdgeSet c;
    c.set(static_cast<std::size_t>(b));
    int x = g.bonds()[static_cast<std::size_t>(b)].a;
    int y = g.bonds()[static_cast<std::size_t>(b)].b;
    while (x != y) {
      if (depth[static_cast<std::size_t>(x)] < depth[static_cast<std::size_t>(y)]) std::swap(x, y);
      c.flip(static_cast<std::size_t>(parent_bond[static_cast<std::size_t>(x)]));
      x = parent[static_cast<std::size_t>(x)];
    }
    cycles.push_back(c);
  }
  return cycles;
}

// Horton candidates: shortest path v->x, edge (x,y), shortest path y->v.
std::vector<EdgeSet> horton_candidates(const MoleculeGraph& g) {
  const int n = g.atom_count();
  std::vector<EdgeSet> out;
  for (int v = 0; v < n; ++v) {
    std::vector<int> dist(static_cast<std::size_t>(n), -1), pb(static_cast<std::size_t>(n), -1),
        par(static_cast<std::size_t>(n), -1);
    dist[static_cast<std::size_t>(v)] = 0;
    std::vector<int> queue{v};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int a = queue[qi];
      for (const auto& nb : g.neighbors(a)) {
        if (dist[static_cast<std::size_t>(nb.atom)] < 0) {
          dist[static_cast<std::size_t>(nb.atom)] = dist[static_cast<std::size_t>(a)] + 1;
          par[static_cast<std::size_t>(nb.atom)] = a;
          pb[static_cast<std::size_t>(nb.atom)] = nb.bond;
          queue.push_back(nb.atom);
        }
      }
    }
    auto path = [&](int x, EdgeSet& s, std::vector<char>& seen) {
      while (x != v) {
        if (seen[static_cast<std::size_t>(x)]) return false;
        seen[static_cast<std::size_t>(x)] = 1;
        s.set(static_cast<std::size_t>(pb[static_cast<std::size_t>(x)]));
        x = par[static_cast<std::size_t>(x)];
      }
      return true;
    };
    for (int b = 0; b < g.bond_count(); ++b) {
      const auto& bd = g.bonds()[static_cast<std::size_t>(b)];
      if (dist[static_cast<std::size_t>(bd.a)] < 0 || pb[static_cast<std::size_t>(bd.a)] == b ||
          pb[static_cast<std::size_t>(bd.b)] == b) {
        continue;
      }
      EdgeSet s;
      s.set(static_cast<std::size_t>(b));
      std::vector<char> seen(static_cast<std::size_t>(n), 0);
      if (!path(bd.a, s, seen) || !path(bd.b, s, seen)) continue;
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

int RingInfo::max_ring_size() const noexcept {
  std::size_t m = 0;
  for (const auto& r : atom_rings) m = std::max(m, r.size());
  return static_cast<int>(m);
}

RingInfo find_rings(const MoleculeGraph& g) {
  RingInfo info;
  info.bond_in_ring.assign(static_cast<std::size_t>(g.bond_count()), 0);
  info.atom_in_ring.assign(static_cast<std::size_t>(g.atom_count()), 0);
  if (g.bond_count() < 3 || static_cast<std::size_t>(g.bond_count()) > kMaxBonds) return info;

  const auto fundamentals = fundamental_cycles(g);
  info.cycle_rank = static_cast<int>(fundamentals.size());
  if (fundamentals.empty()) return info;

  std::vector<EdgeSet> candidates;
  std::vector<int> walk;
  if (info.cycle_rank <= kMaxEnumeratedRank) {
    const std::uint32_t combos = 1u << info.cycle_rank;
    for (std::uint32_t mask = 1; mask < combos; ++mask) {
      EdgeSet s;
      for (int i = 0; i < info.cycle_rank; ++i) {
        if (mask & (1u << i)) s ^= fundamentals[static_cast<std::size_t>(i)];
      }
      if (as_simple_cycle(g, s, walk)) candidates.push_back(s);
    }
  } else {
    candidates = horton_candidates(g);
  }
  std::sort(candidates.begin(), candidates.end(), [](const EdgeSet& a, const EdgeSet& b) {
    const auto ca = a.count(), cb = b.count();
    return ca != cb ? ca < cb : edge_set_less(a, b);
  });
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  Gf2Basis shorter;
  std::size_t i = 0;
  while (i < candidates.size()) {
    std::size_t j = i;
    const auto len = candidates[i].count();
    while (j < candidates.size() && candidates[j].count() == len) ++j;
    for (std::size_t c = i; c < j; ++c) {
      if (shorter.in_span(candidates[c])) continue;
      as_simple_cycle(g, candidates[c], walk);
      info.atom_rings.push_back(walk);
      std::vector<int> bonds;
      for (std::size_t w = 0; w < walk.size(); ++w) {
        bonds.push_back(g.find_bond(walk[w], walk[(w + 1) % walk.size()]));
      }
      info.bond_rings.push_back(bonds);
    }
    for (std::size_t c = i; c < j; ++c) shorter.insert(candidates[c]);
    i = j;
  }
  for (const auto& r : info.atom_rings) {
    for (int a : r) info.atom_in_ring[static_cast<std::size_t>(a)] = 1;
  }
  for (const auto& r : info.bond_rings) {
    for (int b : r) info.bond_in_ring[static_cast<std::size_t>(b)] = 1;
  }
  return info;
}

namespace {

enum class Donor { None, Vacant, One, Two };

int default_valence(Element e) { return max_valence(e); }

int outer_electrons(Element e) {
  switch (e) {
    case Element::C: return 4;
    case Element::N: return 5;
    case Element::O: return 6;
    case Element::F:
    case Element::Cl: return 7;
  }
  return 0;
}

bool more_electronegative(Element a, Element b) {
  const int na = outer_electrons(a), nb = outer_electrons(b);
  if (na != nb) return na > nb;
  return atomic_number(a) < atomic_number(b);
}

int count_atom_electrons(const MoleculeGraph& g, int i) {
  const auto& at = g.atoms()[static_cast<std::size_t>(i)];
  const int dv = default_valence(at.element);
  if (dv <= 1) return -1;
  const int degree = g.heavy_degree(i) + at.hydrogens;
  if (degree > 3) return -1;
  const int nlp = std::max(outer_electrons(at.element) - dv, 0);
  int res = (dv - degree) + nlp;
  if (res > 1 && g.bond_order_sum(i) - g.heavy_degree(i) > 1) res = 1;
  return res;
}

Donor donor_type(const MoleculeGraph& g, const RingInfo& rings, int i) {
  const int nelec = count_atom_electrons(g, i);
  if (nelec < 0) return Donor::None;
  int exocyclic_partner = -1;
  bool cyclic_multiple = false;
  for (const auto& nb : g.neighbors(i)) {
    const auto& bd = g.bonds()[static_cast<std::size_t>(nb.bond)];
    if (bd.order < 2) continue;
    if (rings.bond_in_ring[static_cast<std::size_t>(nb.bond)]) {
      cyclic_multiple = true;
    } else if (exocyclic_partner < 0) {
      exocyclic_partner = nb.atom;
    }
  }
  const bool any_multiple = g.bond_order_sum(i) != g.heavy_degree(i);
  if (nelec == 0) {
    if (exocyclic_partner >= 0) return Donor::Vacant;
    return cyclic_multiple ? Donor::One : Donor::None;
  }
  if (nelec == 1) {
    if (exocyclic_partner >= 0) {
      return more_electronegative(g.atoms()[static_cast<std::size_t>(exocyclic_partner)].element,
                                  g.atoms()[static_cast<std::size_t>(i)].element)
                 ? Donor::Vacant
                 : Donor::One;
    }
    return any_multiple ? Donor::One : Donor::None;
  }
  return any_multiple ? Donor::One : Donor::Two;
}

bool is_candidate(const MoleculeGraph& g, int i, Donor d) {
  if (d == Donor::None) return false;
  if (g.bond_order_sum(i) - g.heavy_degree(i) > 1) {
    int n_multiple = 0;
    for (const auto& nb : g.neighbors(i)) {
      if (g.bonds()[static_cast<std::size_t>(nb.bond)].order >= 2) ++n_multiple;
    }
    if (n_multiple > 1) return false;
  }
  return true;
}

bool huckel(const std::vector<int>& atoms, const std::vector<Donor>& donors) {
  int lo = 0, hi = 0;
  for (int a : atoms) {
    switch (donors[static_cast<std::size_t>(a)]) {
      case Donor::One: lo += 1; hi += 1; break;
      case Donor::Two: lo += 2; hi += 2; break;
      default: break;
    }
  }
  if (hi >= 6) {
    for (int e = lo; e <= hi; ++e) {
      if ((e - 2) % 4 == 0) return true;
    }
    return false;
  }
  return hi == 2;
}

bool shares_bond(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  }
  return false;
}

// True when the chosen rings form one bond-connected system.
bool combination_fused(const std::vector<int>& comb, const std::vector<std::vector<int>>& bond_rings) {
  std::vector<char> reached(comb.size(), 0);
  reached[0] = 1;
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < comb.size(); ++i) {
      if (reached[i]) continue;
      for (std::size_t j = 0; j < comb.size(); ++j) {
        if (reached[j] && shares_bond(bond_rings[static_cast<std::size_t>(comb[i])],
                                      bond_rings[static_cast<std::size_t>(comb[j])])) {
          reached[i] = 1;
          grew = true;
          break;
        }
      }
    }
  }
  return std::all_of(reached.begin(), reached.end(), [](char c) { return c != 0; });
}

constexpr std::size_t kMaxFusedRings = 6;

}  // namespace

void perceive_aromaticity(MoleculeGraph& g, const RingInfo& rings) {
  if (rings.atom_rings.empty()) return;
  const auto n = static_cast<std::size_t>(g.atom_count());
  std::vector<Donor> donors(n);
  std::vector<char> candidate(n);
  for (std::size_t i = 0; i < n; ++i) {
    donors[i] = donor_type(g, rings, static_cast<int>(i));
    candidate[i] = is_candidate(g, static_cast<int>(i), donors[i]);
  }

  std::vector<std::size_t> cand_rings;
  for (std::size_t r = 0; r < rings.atom_rings.size(); ++r) {
    const auto& ring = rings.atom_rings[r];
    if (std::all_of(ring.begin(), ring.end(), [&](int a) { return candidate[static_cast<std::size_t>(a)] != 0; })) {
      cand_rings.push_back(r);
    }
  }
  if (cand_rings.empty()) return;

  std::vector<std::vector<int>> cbonds;
  for (auto r : cand_rings) cbonds.push_back(rings.bond_rings[r]);

  std::vector<char> arom_ring(cand_rings.size(), 0);
  std::vector<char> assigned(cand_rings.size(), 0);
  for (std::size_t seed = 0; seed < cand_rings.size(); ++seed) {
    if (assigned[seed]) continue;
    // Collect the fused system containing `seed`.
    std::vector<int> system{static_cast<int>(seed)};
    assigned[seed] = 1;
    for (std::size_t qi = 0; qi < system.size(); ++qi) {
      for (std::size_t o = 0; o < cand_rings.size(); ++o) {
        if (!assigned[o] && shares_bond(cbonds[static_cast<std::size_t>(system[qi])], cbonds[o])) {
          assigned[o] = 1;
          system.push_back(static_cast<int>(o));
        }
      }
    }
    std::sort(system.begin(), system.end());

    std::vector<char> in_system(n, 0);
    for (int r : system) {
      for (int a : rings.atom_rings[cand_rings[static_cast<std::size_t>(r)]]) in_system[static_cast<std::size_t>(a)] = 1;
    }
    const auto system_atoms = static_cast<std::size_t>(std::count(in_system.begin(), in_system.end(), 1));
    std::vector<char> done_atoms(n, 0);

    const std::size_t limit = std::min(system.size(), kMaxFusedRings);
    for (std::size_t size = 1; size <= limit; ++size) {
      if (static_cast<std::size_t>(std::count(done_atoms.begin(), done_atoms.end(), 1)) == system_atoms) break;
      std::vector<std::size_t> idx(size);
      std::iota(idx.begin(), idx.end(), 0);
      while (true) {
        std::vector<int> comb;
        for (auto k : idx) comb.push_back(system[k]);
        if (size == 1 || combination_fused(comb, cbonds)) {
          std::vector<int> multiplicity(n, 0);
          for (int r : comb) {
            for (int a : rings.atom_rings[cand_rings[static_cast<std::size_t>(r)]]) ++multiplicity[static_cast<std::size_t>(a)];
          }
          std::vector<int> unon;
          for (std::size_t a = 0; a < n; ++a) {
            if (multiplicity[a] == 1 || multiplicity[a] == 2) unon.push_back(static_cast<int>(a));
          }
          if (huckel(unon, donors)) {
            for (int r : comb) {
              arom_ring[static_cast<std::size_t>(r)] = 1;
              for (int a : rings.atom_rings[cand_rings[static_cast<std::size_t>(r)]]) done_atoms[static_cast<std::size_t>(a)] = 1;
            }
          }
        }
        // Next combination in lexicographic order.
        std::size_t p = size;
        while (p > 0 && idx[p - 1] == system.size() - size + (p - 1)) --p;
        if (p == 0) break;
        ++idx[p - 1];
        for (std::size_t q = p; q < size; ++q) idx[q] = idx[q - 1] + 1;
      }
    }
  }

  auto& atoms = g.mutable_atoms();
  auto& bonds = g.mutable_bonds();
  for (std::size_t r = 0; r < cand_rings.size(); ++r) {
    if (!arom_ring[r]) continue;
    for (int a : rings.atom_rings[cand_rings[r]]) atoms[static_cast<std::size_t>(a)].aromatic = true;
    for (int b : cbonds[r]) bonds[static_cast<std::size_t>(b)].aromatic = true;
  }
}

}  // namespace qevo::chem

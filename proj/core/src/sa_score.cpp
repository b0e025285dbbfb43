#include "qevo/sa_score.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include "qevo/canonical.hpp"
#include "qevo/error.hpp"
#include "qevo/fingerprint.hpp"
#include "qevo/rings.hpp"

extern "C" const unsigned char qevo_sa_fragments_begin[];
extern "C" const unsigned char qevo_sa_fragments_end[];

namespace qevo::chem {

namespace {

struct FragmentTable {
  std::vector<std::uint32_t> ids;
  std::vector<std::uint16_t> score_index;
  std::vector<double> scores;

  FragmentTable() {
    const unsigned char* p = qevo_sa_fragments_begin;
    const unsigned char* end = qevo_sa_fragments_end;
    auto need = [&](std::size_t n) {
      if (static_cast<std::size_t>(end - p) < n) throw Error(Errc::Io, "truncated fragment table");
    };
    auto u32 = [&] {
      need(4);
      const std::uint32_t v = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
      p += 4;
      return v;
    };
    need(8);
    if (std::memcmp(p, "QEVOSAF1", 8) != 0) throw Error(Errc::Io, "bad fragment table header");
    p += 8;
    const std::uint32_t nscores = u32();
    const std::uint32_t nids = u32();
    scores.reserve(nscores);
    for (std::uint32_t i = 0; i < nscores; ++i) scores.push_back(static_cast<std::int32_t>(u32()) / 1e4);
    ids.reserve(nids);
    score_index.reserve(nids);
    std::uint32_t id = 0;
    for (std::uint32_t i = 0; i < nids; ++i) {
      std::uint32_t delta = 0;
      for (int shift = 0;; shift += 7) {
        need(1);
        const unsigned char b = *p++;
        delta |= static_cast<std::uint32_t>(b & 0x7F) << shift;
        if (!(b & 0x80)) break;
      }
      id += delta;
      need(2);
      const auto idx = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
      p += 2;
      if (idx >= nscores) throw Error(Errc::Io, "bad fragment score index");
      ids.push_back(id);
      score_index.push_back(idx);
    }
  }
};

const FragmentTable& table() {
  static const FragmentTable t;
  return t;
}

// Atoms at the ends of bond paths shared by two rings that share more than one bond.
std::set<int> bridgehead_atoms(const MoleculeGraph& g, const RingInfo& rings) {
  std::set<int> out;
  const auto& br = rings.bond_rings;
  for (std::size_t i = 0; i < br.size(); ++i) {
    for (std::size_t j = i + 1; j < br.size(); ++j) {
      std::vector<int> shared;
      for (int b : br[i]) {
        if (std::find(br[j].begin(), br[j].end(), b) != br[j].end()) shared.push_back(b);
      }
      if (shared.size() < 2) continue;
      std::vector<int> count(static_cast<std::size_t>(g.atom_count()), 0);
      for (int b : shared) {
        ++count[static_cast<std::size_t>(g.bonds()[static_cast<std::size_t>(b)].a)];
        ++count[static_cast<std::size_t>(g.bonds()[static_cast<std::size_t>(b)].b)];
      }
      for (int a = 0; a < g.atom_count(); ++a) {
        if (count[static_cast<std::size_t>(a)] == 1) out.insert(a);
      }
    }
  }
  return out;
}

int spiro_atoms(const RingInfo& rings) {
  std::set<int> out;
  const auto& ar = rings.atom_rings;
  for (std::size_t i = 0; i < ar.size(); ++i) {
    for (std::size_t j = i + 1; j < ar.size(); ++j) {
      std::vector<int> shared;
      for (int a : ar[i]) {
        if (std::find(ar[j].begin(), ar[j].end(), a) != ar[j].end()) shared.push_back(a);
      }
      if (shared.size() == 1) out.insert(shared[0]);
    }
  }
  return static_cast<int>(out.size());
}

bool in_ring_of_size(const RingInfo& rings, int atom, std::size_t size) {
  return std::any_of(rings.atom_rings.begin(), rings.atom_rings.end(), [&](const auto& r) {
    return r.size() == size && std::find(r.begin(), r.end(), atom) != r.end();
  });
}

// A neighbour with a multiple or aromatic bond conjugates with the lone pair.
bool lone_pair_conjugated(const MoleculeGraph& g, int atom) {
  for (const auto& nb : g.neighbors(atom)) {
    for (const auto& x : g.neighbors(nb.atom)) {
      const auto& b = g.bonds()[static_cast<std::size_t>(x.bond)];
      if (b.aromatic || b.order > 1) return true;
    }
  }
  return false;
}

// Tetrahedral carbons, and pyramidal nitrogens in three-membered rings or at
// bridgeheads, whose substituents all differ.
int stereo_centers(const MoleculeGraph& g, const RingInfo& rings, const std::set<int>& bridgeheads) {
  const auto cls = refine_classes(g);
  int n = 0;
  for (int i = 0; i < g.atom_count(); ++i) {
    const auto& at = g.atoms()[static_cast<std::size_t>(i)];
    const int degree = g.heavy_degree(i);
    if (at.element == Element::C) {
      if (degree + at.hydrogens != 4 || at.hydrogens > 1) continue;
    } else if (at.element == Element::N) {
      if (degree != 3 || at.hydrogens != 0 || at.aromatic) continue;
      if (!in_ring_of_size(rings, i, 3) && !bridgeheads.count(i)) continue;
      if (lone_pair_conjugated(g, i)) continue;
    } else {
      continue;
    }
    std::vector<int> nb;
    for (const auto& x : g.neighbors(i)) nb.push_back(cls[static_cast<std::size_t>(x.atom)]);
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) == nb.end()) ++n;
  }
  return n;
}

}  // namespace

double sa_fragment_score(std::uint32_t id) {
  const auto& t = table();
  const auto it = std::lower_bound(t.ids.begin(), t.ids.end(), id);
  if (it == t.ids.end() || *it != id) return -4.0;
  return t.scores[t.score_index[static_cast<std::size_t>(it - t.ids.begin())]];
}

SaTerms sa_terms(const MoleculeGraph& g) {
  if (!g.valid()) throw Error(Errc::InvalidMolecule, "cannot score an invalid molecule");
  SaTerms t;
  const auto counts = morgan_counts(g, 2);
  int total = 0;
  for (const auto& [id, c] : counts) {
    t.fragment += sa_fragment_score(id) * c;
    total += c;
  }
  t.fragment /= total;
  t.environments = static_cast<int>(counts.size());
  t.atoms = g.atom_count();
  const auto rings = find_rings(g);
  const auto bridgeheads = bridgehead_atoms(g, rings);
  t.bridgeheads = static_cast<int>(bridgeheads.size());
  t.spiro = spiro_atoms(rings);
  t.stereo_centers = stereo_centers(g, rings, bridgeheads);
  for (const auto& r : rings.atom_rings) t.macrocycles += r.size() > 8 ? 1 : 0;
  return t;
}

double sa_score(const MoleculeGraph& g) {
  const SaTerms t = sa_terms(g);
  const double n = t.atoms;
  const double complexity = 0.0 - (std::pow(n, 1.005) - n) - std::log10(t.stereo_centers + 1.0) -
                            std::log10(t.spiro + 1.0) - std::log10(t.bridgeheads + 1.0) -
                            (t.macrocycles > 0 ? std::log10(2.0) : 0.0);
  const double symmetry = t.atoms > t.environments ? std::log(n / t.environments) * 0.5 : 0.0;
  const double raw = t.fragment + complexity + symmetry;
  constexpr double lo = -4.0, hi = 2.5;
  double s = 11.0 - (raw - lo + 1.0) / (hi - lo) * 9.0;
  if (s > 8.0) s = 8.0 + std::log(s + 1.0 - 9.0);
  return std::clamp(s, 1.0, 10.0);
}

}  // namespace qevo::chem

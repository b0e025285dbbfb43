#include "qevo/qed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "qevo/crippen.hpp"
#include "qevo/error.hpp"
#include "qevo/rings.hpp"
#include "qevo/smarts.hpp"

namespace qevo::chem {

namespace {

// Asymmetric double sigmoid parameters A, B, C, D, E, F, DMAX per property.
struct Ads {
  double a, b, c, d, e, f, dmax;
};

constexpr std::array<Ads, 8> kAds = {{
    {2.817065973, 392.5754953, 290.7489764, 2.419764353, 49.22325677, 65.37051707, 104.9805561},
    {3.172690585, 137.8624751, 2.534937431, 4.581497897, 0.822739154, 0.576295591, 131.3186604},
    {2.948620388, 160.4605972, 3.615294657, 4.435986202, 0.290141953, 1.300669958, 148.7763046},
    {1.618662227, 1010.051101, 0.985094388, 0.000000001, 0.713820843, 0.920922555, 258.1632616},
    {1.876861559, 125.2232657, 62.90773554, 87.83366614, 12.01999824, 28.51324732, 104.5686167},
    {0.010000000, 272.4121427, 2.558379970, 1.565547684, 1.271567166, 2.758063707, 105.4420403},
    {3.217788970, 957.7374108, 2.274627939, 0.000000001, 1.317690384, 0.375760881, 312.3372610},
    {0.010000000, 1199.094025, -0.09002883, 0.000000001, 0.185904477, 0.875193782, 417.7253140},
}};

constexpr std::array<double, 8> kMeanWeights = {0.66, 0.46, 0.05, 0.61, 0.06, 0.65, 0.48, 0.95};

double desirability(double x, const Ads& p) {
  const double e1 = 1.0 + std::exp(-(x - p.c + p.d / 2.0) / p.e);
  const double e2 = 1.0 + std::exp(-(x - p.c - p.d / 2.0) / p.f);
  return (p.a + p.b / e1 * (1.0 - 1.0 / e2)) / p.dmax;
}

constexpr const char* kAcceptors[] = {
    "[oH0;X2]",     "[OH1;X2;v2]",  "[OH0;X2;v2]",  "[OH0;X1;v2]",     "[O-;X1]",  "[SH0;X2;v2]",
    "[SH0;X1;v2]",  "[S-;X1]",      "[nH0;X2]",     "[NH0;X1;v3]",     "[$([N;+0;X3;v3]);!$(N[C,S]=O)]"};

constexpr const char* kDonors = "[N&!H0&v3,N&!H0&+1&v4,O&H1&+0,S&H1&+0,n&H1&+0]";

constexpr const char* kRotatable =
    "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)&!$(C([CH3])([CH3])[CH3])&!$([CD3](=[N,O,S])-!@[#7,O,S!D1])"
    "&!$([#7,O,S!D1]-!@[CD3]=[N,O,S])&!$([CD3](=[N+])-!@[#7!D1])&!$([#7!D1]-!@[CD3]=[N+])]-,:;!@"
    "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)&!$(C([CH3])([CH3])[CH3])]";

constexpr const char* kAliphaticRingAtom = "[$([A;R][!a])]";

// Unwanted-functionality filters of the QED reference set.
constexpr const char* kAlerts[] = {
    "*1[O,S,N]*1", "[S,C](=[O,S])[F,Br,Cl,I]", "[CX4][Cl,Br,I]", "[#6]S(=O)(=O)O[#6]",
    "[$([CH]),$(CC)]#CC(=O)[#6]", "[$([CH]),$(CC)]#CC(=O)O[#6]", "n[OH]", "[$([CH]),$(CC)]#CS(=O)(=O)[#6]",
    "C=C(C=O)C=O", "n1c([F,Cl,Br,I])cccc1", "[CH1](=O)", "[#8][#8]", "[C;!R]=[N;!R]", "[N!R]=[N!R]",
    "[#6](=O)[#6](=O)", "[#16][#16]", "[#7][NH2]", "C(=O)N[NH2]", "[#6]=S",
    "[$([CH2]),$([CH][CX4]),$(C([CX4])[CX4])]=[$([CH2]),$([CH][CX4]),$(C([CX4])[CX4])]",
    "C1(=[O,N])C=CC(=[O,N])C=C1", "C1(=[O,N])C(=[O,N])C=CC=C1", "a21aa3a(aa1aaaa2)aaaa3",
    "a31a(a2a(aa1)aaaa2)aaaa3", "a1aa2a3a(a1)A=AA=A3=AA=A2", "c1cc([NH2])ccc1",
    "[Hg,Fe,As,Sb,Zn,Se,se,Te,B,Si,Na,Ca,Ge,Ag,Mg,K,Ba,Sr,Be,Ti,Mo,Mn,Ru,Pd,Ni,Cu,Au,Cd,Al,Ga,Sn,Rh,Tl,Bi,Nb,Li,Pb,Hf,Ho]",
    "I", "OS(=O)(=O)[O-]", "[N+](=O)[O-]", "C(=O)N[OH]", "C1NC(=O)NC(=O)1", "[SH]", "[S-]",
    "c1ccc([Cl,Br,I,F])c([Cl,Br,I,F])c1[Cl,Br,I,F]", "c1cc([Cl,Br,I,F])cc([Cl,Br,I,F])c1[Cl,Br,I,F]",
    "[CR1]1[CR1][CR1][CR1][CR1][CR1][CR1]1", "[CR1]1[CR1][CR1]cc[CR1][CR1]1",
    "[CR2]1[CR2][CR2][CR2][CR2][CR2][CR2][CR2]1", "[CR2]1[CR2][CR2]cc[CR2][CR2][CR2]1",
    "[CH2R2]1N[CH2R2][CH2R2][CH2R2][CH2R2][CH2R2]1", "[CH2R2]1N[CH2R2][CH2R2][CH2R2][CH2R2][CH2R2][CH2R2]1", "C#C",
    "[OR2,NR2]@[CR2]@[CR2]@[OR2,NR2]@[CR2]@[CR2]@[OR2,NR2]", "[$([N+R]),$([n+R]),$([N+]=C)][O-]", "[#6]=N[OH]",
    "[#6]=NOC=O", "[#6](=O)[CX4,CR0X3,O][#6](=O)", "c1ccc2c(c1)ccc(=O)o2", "[O+,o+,S+,s+]", "N=C=O",
    "[NX3,NX4][F,Cl,Br,I]", "c1ccccc1OC(=O)[#6]", "[CR0]=[CR0][CR0]=[CR0]", "[C+,c+,C-,c-]", "N=[N+]=[N-]",
    "C12C(NC(N1)=O)CSC2", "c1c([OH])c([OH,NH2,NH])ccc1", "P", "[N,O,S]C#N", "C=C=O", "[Si][F,Cl,Br,I]",
    "[SX2]O", "[SiR0,CR0](c1ccccc1)(c2ccccc2)(c3ccccc3)", "O1CCCCC1OC2CCC3CCCCC3C2", "N=[CR0][N,n,O,S]",
    "[cR2]1[cR2][cR2]([Nv3X3,Nv4X4])[cR2][cR2][cR2]1[cR2]2[cR2][cR2][cR2]([Nv3X3,Nv4X4])[cR2][cR2]2",
    "C=[C!r]C#N", "[cR2]1[cR2]c([N+0X3R0,nX3R0])c([N+0X3R0,nX3R0])[cR2][cR2]1",
    "[cR2]1[cR2]c([N+0X3R0,nX3R0])[cR2]c([N+0X3R0,nX3R0])[cR2]1",
    "[cR2]1[cR2]c([N+0X3R0,nX3R0])[cR2][cR2]c1([N+0X3R0,nX3R0])", "[OH]c1ccc([OH,NH2,NH])cc1",
    "c1ccccc1OC(=O)O", "[SX2H0][N]", "c12ccccc1(SC(S)=N2)", "c12ccccc1(SC(=S)N2)", "c1nnnn1C=O",
    "s1c(S)nnc1NC=O", "S1C=CSC1=S", "C(=O)Onnn", "OS(=O)(=O)C(F)(F)F", "N#CC[OH]", "N#CC(=O)",
    "S(=O)(=O)C#N", "N[CH2]C#N", "C1(=O)NCC1", "S(=O)(=O)[O-,OH]", "NC[F,Cl,Br,I]", "C=[C!r]O",
    "[NX2+0]=[O+0]", "[OR0,NR0][OR0,NR0]", "C(=O)O[C,H1].C(=O)O[C,H1].C(=O)O[C,H1]", "[CX2R0][NX3R0]",
    "c1ccccc1[C;!R]=[C;!R]c2ccccc2", "[NX3R0,NX4R0,OR0,SX2R0][CX4][NX3R0,NX4R0,OR0,SX2R0]",
    "[s,S,c,C,n,N,o,O]~[n+,N+](~[s,S,c,C,n,N,o,O])(~[s,S,c,C,n,N,o,O])~[s,S,c,C,n,N,o,O]",
    "[s,S,c,C,n,N,o,O]~[nX3+,NX3+](~[s,S,c,C,n,N])~[s,S,c,C,n,N]", "[*]=[N+]=[*]", "[SX3](=O)[O-,OH]", "N#N",
    "F.F.F.F", "[R0;D2][R0;D2][R0;D2][R0;D2]", "[cR,CR]~C(=O)NC(=O)~[cR,CR]", "C=!@CC=[O,S]",
    "[#6,#8,#16][#6](=O)O[#6]", "c[C;R0](=[O,S])[#6]", "c[SX2][C;!R]", "C=C=C", "c1nc([F,Cl,Br,I,S])ncc1",
    "c1ncnc([F,Cl,Br,I,S])c1", "c1nc(c2c(n1)nc(n2)[F,Cl,Br,I])", "[#6]S(=O)(=O)c1ccc(cc1)F", "[15N]", "[13C]",
    "[18O]", "[34S]"};

struct Queries {
  std::vector<smarts::Pattern> acceptors;
  smarts::Pattern donors{kDonors};
  smarts::Pattern rotatable{kRotatable};
  smarts::Pattern aliphatic_ring_atom{kAliphaticRingAtom};
  std::vector<smarts::Pattern> alerts;

  Queries() {
    for (const char* s : kAcceptors) acceptors.emplace_back(s);
    for (const char* s : kAlerts) alerts.emplace_back(s);
  }
};

const Queries& queries() {
  static const Queries q;
  return q;
}

double atomic_weight(Element e) {
  switch (e) {
    case Element::C: return 12.011;
    case Element::N: return 14.007;
    case Element::O: return 15.999;
    case Element::F: return 18.998;
    case Element::Cl: return 35.453;
  }
  return 0.0;
}

constexpr double kHydrogenWeight = 1.008;

// Polar surface contribution of one N or O atom; all atoms are neutral.
double psa_contribution(const MoleculeGraph& g, const RingInfo& rings, int atom) {
  const auto& a = g.atoms()[static_cast<std::size_t>(atom)];
  const int nbrs = g.heavy_degree(atom);
  const int hs = a.hydrogens;
  int single = 0, dbl = 0, triple = 0, arom = 0;
  for (const auto& nb : g.neighbors(atom)) {
    const auto& b = g.bonds()[static_cast<std::size_t>(nb.bond)];
    if (b.aromatic) {
      ++arom;
    } else if (b.order == 1) {
      ++single;
    } else if (b.order == 2) {
      ++dbl;
    } else {
      ++triple;
    }
  }
  bool in3 = false;
  for (const auto& r : rings.atom_rings) {
    if (r.size() == 3 && std::find(r.begin(), r.end(), atom) != r.end()) in3 = true;
  }
  double v = -1.0;
  if (a.element == Element::N) {
    switch (nbrs) {
      case 1:
        if (hs == 0 && triple == 1) v = 23.79;
        else if (hs == 1 && dbl == 1) v = 23.85;
        else if (hs == 2 && single == 1) v = 26.02;
        break;
      case 2:
        if (hs == 0 && single == 1 && dbl == 1) v = 12.36;
        else if (hs == 0 && triple == 1 && dbl == 1) v = 13.60;
        else if (hs == 1 && single == 2) v = in3 ? 21.94 : 12.03;
        else if (hs == 0 && arom == 2) v = 12.89;
        else if (hs == 1 && arom == 2) v = 15.79;
        break;
      case 3:
        if (hs == 0 && single == 3) v = in3 ? 3.01 : 3.24;
        else if (hs == 0 && single == 1 && dbl == 2) v = 11.68;
        else if (hs == 0 && arom == 3) v = 4.41;
        else if (hs == 0 && single == 1 && arom == 2) v = 4.93;
        else if (hs == 0 && dbl == 1 && arom == 2) v = 8.39;
        break;
      default: break;
    }
    if (v < 0) v = std::max(0.0, 30.5 - 8.2 * nbrs + 1.5 * hs);
  } else if (a.element == Element::O) {
    switch (nbrs) {
      case 1:
        if (hs == 0 && dbl == 1) v = 17.07;
        else if (hs == 1 && single == 1) v = 20.23;
        break;
      case 2:
        if (hs == 0 && single == 2) v = in3 ? 12.53 : 9.23;
        else if (hs == 0 && arom == 2) v = 13.14;
        break;
      default: break;
    }
    if (v < 0) v = std::max(0.0, 28.5 - 8.6 * nbrs + 1.5 * hs);
  } else {
    v = 0.0;
  }
  return v;
}

double tpsa(const MoleculeGraph& g, const RingInfo& rings) {
  double sum = 0.0;
  for (int i = 0; i < g.atom_count(); ++i) sum += psa_contribution(g, rings, i);
  return sum;
}

// Cycle rank of the graph left after deleting atoms flagged in `drop`.
int cycle_rank_without(const MoleculeGraph& g, const std::vector<char>& drop) {
  const int n = g.atom_count();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  int cycles = 0;
  for (const auto& b : g.bonds()) {
    if (drop[static_cast<std::size_t>(b.a)] || drop[static_cast<std::size_t>(b.b)]) continue;
    const int ra = root(b.a), rb = root(b.b);
    if (ra == rb) {
      ++cycles;
    } else {
      parent[static_cast<std::size_t>(ra)] = rb;
    }
  }
  return cycles;
}

}  // namespace

double tpsa(const MoleculeGraph& g) {
  if (!g.valid()) throw Error(Errc::InvalidMolecule, "cannot describe an invalid molecule");
  return tpsa(g, find_rings(g));
}

QedProperties qed_properties(const MoleculeGraph& g) {
  if (!g.valid()) throw Error(Errc::InvalidMolecule, "cannot describe an invalid molecule");
  const RingInfo rings = find_rings(g);
  const smarts::Graph view(g, rings, false);
  const Queries& q = queries();
  QedProperties p;
  for (const auto& a : g.atoms()) p.mw += atomic_weight(a.element) + kHydrogenWeight * a.hydrogens;
  p.alogp = crippen_logp(g);
  for (const auto& pat : q.acceptors) p.hba += pat.count_unique(view);
  p.hbd = q.donors.count_unique(view);
  p.psa = tpsa(g, rings);
  p.rotb = q.rotatable.count_unique(view);
  std::vector<char> drop(static_cast<std::size_t>(g.atom_count()), 0);
  for (int i = 0; i < g.atom_count(); ++i) drop[static_cast<std::size_t>(i)] = q.aliphatic_ring_atom.matches_at(view, i);
  p.arom = cycle_rank_without(g, drop);
  for (const auto& pat : q.alerts) p.alerts += pat.matches(view) ? 1 : 0;
  return p;
}

double qed(const QedProperties& p) {
  const std::array<double, 8> x = {p.mw, p.alogp, static_cast<double>(p.hba), static_cast<double>(p.hbd),
                                   p.psa, static_cast<double>(p.rotb), static_cast<double>(p.arom),
                                   static_cast<double>(p.alerts)};
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += kMeanWeights[i] * std::log(desirability(x[i], kAds[i]));
    den += kMeanWeights[i];
  }
  return std::exp(num / den);
}

double qed(const MoleculeGraph& g) { return g.valid() ? qed(qed_properties(g)) : 0.0; }

}  // namespace qevo::chem

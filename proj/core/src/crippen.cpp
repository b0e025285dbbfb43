#include "qevo/crippen.hpp"

#include <cmath>
#include <string_view>

#include "qevo/error.hpp"
#include "qevo/smarts.hpp"

namespace qevo::chem {

namespace {

// Wildman & Crippen, J. Chem. Inf. Comput. Sci. 39 (1999) 868, as tabulated
// in the RDKit parameter set. First matching pattern wins; rows for
// elements the decoder cannot produce (S, P, Br, I, metals) are omitted.
// The two catch-all H2 rows test atomic numbers, so hydrogens on aromatic
// nitrogen fall through to H3 as in the toolkit's compiled-in table.
struct Row {
  const char* type;
  const char* smarts;
  double logp;
};

constexpr Row kRows[] = {
    {"C1", "[CH4]", 0.1441},
    {"C1", "[CH3]C", 0.1441},
    {"C1", "[CH2](C)C", 0.1441},
    {"C2", "[CH](C)(C)C", 0.0},
    {"C2", "[C](C)(C)(C)C", 0.0},
    {"C3", "[CH3][N,O,P,S,F,Cl,Br,I]", -0.2035},
    {"C3", "[CH2X4]([N,O,P,S,F,Cl,Br,I])[A;!#1]", -0.2035},
    {"C4", "[CH1X4]([N,O,P,S,F,Cl,Br,I])([A;!#1])[A;!#1]", -0.2051},
    {"C4", "[CH0X4]([N,O,P,S,F,Cl,Br,I])([A;!#1])([A;!#1])[A;!#1]", -0.2051},
    {"C5", "[C]=[!C;A;!#1]", -0.2783},
    {"C6", "[CH2]=C", 0.1551},
    {"C6", "[CH1](=C)[A;!#1]", 0.1551},
    {"C6", "[CH0](=C)([A;!#1])[A;!#1]", 0.1551},
    {"C6", "[C](=C)=C", 0.1551},
    {"C7", "[CX2]#[A;!#1]", 0.0017},
    {"C8", "[CH3]c", 0.08452},
    {"C9", "[CH3]a", -0.1444},
    {"C10", "[CH2X4]a", -0.0516},
    {"C11", "[CHX4]a", 0.1193},
    {"C12", "[CH0X4]a", -0.0967},
    {"C13", "[cH0]-[A;!C;!N;!O;!S;!F;!Cl;!Br;!I;!#1]", -0.5443},
    {"C14", "[c][#9]", 0.0},
    {"C15", "[c][#17]", 0.245},
    {"C18", "[cH]", 0.1581},
    {"C19", "[c](:a)(:a):a", 0.2955},
    {"C20", "[c](:a)(:a)-a", 0.2713},
    {"C21", "[c](:a)(:a)-C", 0.136},
    {"C22", "[c](:a)(:a)-N", 0.4619},
    {"C23", "[c](:a)(:a)-O", 0.5437},
    {"C25", "[c](:a)(:a)=[C,N,O]", -0.8186},
    {"C26", "[C](=C)(a)[A;!#1]", 0.264},
    {"C26", "[C](=C)(c)a", 0.264},
    {"C26", "[CH1](=C)a", 0.264},
    {"C26", "[C]=c", 0.264},
    {"C27", "[CX4][A;!C;!N;!O;!P;!S;!F;!Cl;!Br;!I;!#1]", 0.2148},
    {"CS", "[#6]", 0.08129},
    {"H1", "[#1][#6,#1]", 0.123},
    {"H2", "[#1]O[CX4,c]", -0.2677},
    {"H2", "[#1]O[!#6;!#7;!#8;!#16]", -0.2677},
    {"H2", "[#1][!#6;!#7;!#8]", -0.2677},
    {"H3", "[#1][#7]", 0.2142},
    {"H3", "[#1]O[#7]", 0.2142},
    {"H4", "[#1]OC=[#6,#7,O,S]", 0.298},
    {"H4", "[#1]O[O,S]", 0.298},
    {"HS", "[#1]", 0.1125},
    {"N1", "[NH2+0][A;!#1]", -1.019},
    {"N2", "[NH+0]([A;!#1])[A;!#1]", -0.7096},
    {"N3", "[NH2+0]a", -1.027},
    {"N4", "[NH1+0]([!#1;A,a])a", -0.5188},
    {"N5", "[NH+0]=[!#1;A,a]", 0.08387},
    {"N6", "[N+0](=[!#1;A,a])[!#1;A,a]", 0.1836},
    {"N7", "[N+0]([A;!#1])([A;!#1])[A;!#1]", -0.3187},
    {"N8", "[N+0](a)([!#1;A,a])[A;!#1]", -0.4458},
    {"N8", "[N+0](a)(a)a", -0.4458},
    {"N9", "[N+0]#[A;!#1]", 0.01508},
    {"N11", "[n+0]", -0.3239},
    {"NS", "[#7]", -0.4806},
    {"O1", "[o]", 0.1552},
    {"O2", "[OH,OH2]", -0.2893},
    {"O3", "[O]([A;!#1])[A;!#1]", -0.0684},
    {"O4", "[O](a)[!#1;A,a]", -0.4195},
    {"O5", "[O]=[#7,#8]", 0.0335},
    {"O8", "[O]=c", 0.1788},
    {"O9", "[O]=[CH]C", -0.1526},
    {"O9", "[O]=C(C)([A;!#1])", -0.1526},
    {"O9", "[O]=[CH][N,O]", -0.1526},
    {"O9", "[O]=[CH2]", -0.1526},
    {"O9", "[O]=[CX2]=O", -0.1526},
    {"O10", "[O]=[CH]c", 0.1129},
    {"O10", "[O]=C([C,c])[a;!#1]", 0.1129},
    {"O10", "[O]=C(c)[A;!#1]", 0.1129},
    {"O11", "[O]=C([!#1;!#6])[!#1;!#6]", 0.4833},
    {"OS", "[#8]", -0.1188},
    {"F", "[#9-0]", 0.4202},
    {"Cl", "[#17-0]", 0.6895},
};

struct Compiled {
  const Row* row;
  int z;  // element named by the type; the pattern's first atom has it
  smarts::Pattern pattern;
};

int type_element(std::string_view type) {
  if (type == "Cl") return 17;
  switch (type[0]) {
    case 'C': return 6;
    case 'H': return 1;
    case 'N': return 7;
    case 'O': return 8;
    case 'F': return 9;
    default: return 0;
  }
}

const std::vector<Compiled>& patterns() {
  static const std::vector<Compiled> compiled = [] {
    std::vector<Compiled> out;
    for (const auto& r : kRows) out.push_back({&r, type_element(r.type), smarts::Pattern(r.smarts)});
    return out;
  }();
  return compiled;
}

}  // namespace

std::vector<CrippenAtom> crippen_types(const MoleculeGraph& g) {
  if (!g.valid()) throw Error(Errc::InvalidMolecule, "cannot type an invalid molecule");
  const smarts::Graph t(g, RingInfo{}, true);
  std::vector<CrippenAtom> out;
  out.reserve(static_cast<std::size_t>(t.atom_count()));
  for (int a = 0; a < t.atom_count(); ++a) {
    const Compiled* hit = nullptr;
    for (const auto& pat : patterns()) {
      if (pat.z == t.atom(a).z && pat.pattern.matches_at(t, a)) {
        hit = &pat;
        break;
      }
    }
    if (!hit) {
      throw Error(Errc::UnsupportedAtomClass,
                  "no Crippen type for atom " + std::to_string(a) + " (Z=" + std::to_string(t.atom(a).z) + ")");
    }
    out.push_back({hit->row->type, hit->row->logp});
  }
  return out;
}

double crippen_logp(const MoleculeGraph& g) {
  // Every contribution has at most five decimals, so an integer sum is exact
  // and independent of atom order.
  long long sum = 0;
  for (const auto& c : crippen_types(g)) sum += std::llround(c.logp * 1e5);
  return static_cast<double>(sum) / 1e5;
}

}  // namespace qevo::chem

#include "qevo/smarts.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <map>
#include <set>

#include "qevo/error.hpp"

namespace qevo::chem::smarts {

// ---- graph ---------------------------------------------------------------

Graph::Graph(const MoleculeGraph& g, bool explicit_h) : Graph(g, find_rings(g), explicit_h) {}

Graph::Graph(const MoleculeGraph& g, const RingInfo& rings, bool explicit_h) {
  const int n = g.atom_count();
  atoms_.resize(static_cast<std::size_t>(n));
  adj_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& a = g.atoms()[static_cast<std::size_t>(i)];
    auto& v = atoms_[static_cast<std::size_t>(i)];
    v.z = atomic_number(a.element);
    v.aromatic = a.aromatic;
    v.total_h = a.hydrogens;
    v.implicit_h = explicit_h ? 0 : a.hydrogens;
    v.degree = g.heavy_degree(i) + (explicit_h ? a.hydrogens : 0);
    v.total_degree = g.heavy_degree(i) + a.hydrogens;
    v.valence = g.bond_order_sum(i) + a.hydrogens;
  }
  for (const auto& ring : rings.atom_rings) {
    for (int a : ring) {
      auto& v = atoms_[static_cast<std::size_t>(a)];
      ++v.ring_count;
      if (ring.size() < 64) v.ring_sizes |= std::uint64_t{1} << ring.size();
    }
  }
  for (int b = 0; b < g.bond_count(); ++b) {
    const auto& bd = g.bonds()[static_cast<std::size_t>(b)];
    // A triple bond inside an aromatic ring keeps its triple type.
    const BondKind kind = bd.order == 3   ? BondKind::Triple
                          : bd.aromatic   ? BondKind::Aromatic
                          : bd.order == 2 ? BondKind::Double
                                          : BondKind::Single;
    const bool ring = static_cast<std::size_t>(b) < rings.bond_in_ring.size() && rings.bond_in_ring[static_cast<std::size_t>(b)];
    bonds_.push_back({bd.a, bd.b, kind, ring});
    adj_[static_cast<std::size_t>(bd.a)].push_back({bd.b, b});
    adj_[static_cast<std::size_t>(bd.b)].push_back({bd.a, b});
    if (ring) {
      ++atoms_[static_cast<std::size_t>(bd.a)].ring_bonds;
      ++atoms_[static_cast<std::size_t>(bd.b)].ring_bonds;
    }
  }
  for (const auto& v : atoms_) elements_.set(static_cast<std::size_t>(std::min(v.z, 127)));
  if (!explicit_h) return;
  if (std::any_of(g.atoms().begin(), g.atoms().end(), [](const auto& a) { return a.hydrogens > 0; })) elements_.set(1);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < g.atoms()[static_cast<std::size_t>(i)].hydrogens; ++k) {
      const int h = static_cast<int>(atoms_.size());
      const int b = static_cast<int>(bonds_.size());
      AtomView v;
      v.z = 1;
      v.degree = v.total_degree = v.valence = 1;
      atoms_.push_back(v);
      bonds_.push_back({i, h, BondKind::Single, false});
      adj_.push_back({{i, b}});
      adj_[static_cast<std::size_t>(i)].push_back({h, b});
    }
  }
}

int Graph::memo(int slot, int atom) const {
  const auto i = static_cast<std::size_t>(slot) * atoms_.size() + static_cast<std::size_t>(atom);
  return i < memo_.size() ? memo_[i] : -1;
}

void Graph::set_memo(int slot, int atom, bool value) const {
  const auto i = static_cast<std::size_t>(slot) * atoms_.size() + static_cast<std::size_t>(atom);
  if (i >= memo_.size()) memo_.resize(std::max(i - static_cast<std::size_t>(atom) + atoms_.size(), 2 * memo_.size()), -1);
  memo_[i] = value ? 1 : 0;
}

int Graph::find_bond(int a, int b) const {
  for (const auto& e : edges(a)) {
    if (e.to == b) return e.bond;
  }
  return -1;
}

// ---- query expressions ---------------------------------------------------

namespace {

constexpr std::array<std::string_view, 119> kElements = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",  "S",
    "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn",
    "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho",
    "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md",
    "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

int element_number(std::string_view sym) {
  for (std::size_t z = 1; z < kElements.size(); ++z) {
    if (kElements[z] == sym) return static_cast<int>(z);
  }
  return 0;
}

struct AtomExpr {
  enum Kind {
    True, Element, AtomicNum, Aliphatic, Aromatic, Isotope, TotalH, ImplicitH, Degree, TotalDegree,
    Valence, InRing, RingCount, RingSize, RingBonds, Charge, Recursive, Not, And, Or
  } kind = True;
  int value = 0;
  bool aromatic = false;
  std::vector<std::unique_ptr<AtomExpr>> args;
  std::unique_ptr<Pattern> sub;
  int slot = -1;  // memo slot of a recursive query
};

std::atomic<int> next_memo_slot{0};

struct BondExpr {
  enum Kind { Default, Single, Double, Triple, Aromatic, Any, Ring, Not, And, Or } kind = Default;
  std::vector<std::unique_ptr<BondExpr>> args;
};

bool eval_bond(const BondExpr& e, const BondView& b) {
  switch (e.kind) {
    case BondExpr::Default: return b.kind == BondKind::Single || b.kind == BondKind::Aromatic;
    case BondExpr::Single: return b.kind == BondKind::Single;
    case BondExpr::Double: return b.kind == BondKind::Double;
    case BondExpr::Triple: return b.kind == BondKind::Triple;
    case BondExpr::Aromatic: return b.kind == BondKind::Aromatic;
    case BondExpr::Any: return true;
    case BondExpr::Ring: return b.in_ring;
    case BondExpr::Not: return !eval_bond(*e.args[0], b);
    case BondExpr::And:
      return std::all_of(e.args.begin(), e.args.end(), [&](const auto& a) { return eval_bond(*a, b); });
    case BondExpr::Or:
      return std::any_of(e.args.begin(), e.args.end(), [&](const auto& a) { return eval_bond(*a, b); });
  }
  return false;
}

bool eval_atom(const AtomExpr& e, const Graph& g, int atom) {
  const AtomView& v = g.atom(atom);
  switch (e.kind) {
    case AtomExpr::True: return true;
    case AtomExpr::Element: return v.z == e.value && v.aromatic == e.aromatic;
    case AtomExpr::AtomicNum: return v.z == e.value;
    case AtomExpr::Aliphatic: return !v.aromatic;
    case AtomExpr::Aromatic: return v.aromatic;
    case AtomExpr::Isotope: return v.isotope == e.value;
    case AtomExpr::TotalH: return v.total_h == e.value;
    case AtomExpr::ImplicitH: return e.value < 0 ? v.implicit_h > 0 : v.implicit_h == e.value;
    case AtomExpr::Degree: return v.degree == e.value;
    case AtomExpr::TotalDegree: return v.total_degree == e.value;
    case AtomExpr::Valence: return v.valence == e.value;
    case AtomExpr::InRing: return v.ring_count > 0;
    case AtomExpr::RingCount: return v.ring_count == e.value;
    case AtomExpr::RingSize: return e.value < 64 && (v.ring_sizes >> e.value) & 1U;
    case AtomExpr::RingBonds: return e.value < 0 ? v.ring_bonds > 0 : v.ring_bonds == e.value;
    case AtomExpr::Charge: return v.charge == e.value;
    case AtomExpr::Recursive: {
      const int known = g.memo(e.slot, atom);
      if (known >= 0) return known != 0;
      const bool hit = e.sub->matches_at(g, atom);
      g.set_memo(e.slot, atom, hit);
      return hit;
    }
    case AtomExpr::Not: return !eval_atom(*e.args[0], g, atom);
    case AtomExpr::And:
      return std::all_of(e.args.begin(), e.args.end(), [&](const auto& a) { return eval_atom(*a, g, atom); });
    case AtomExpr::Or:
      return std::any_of(e.args.begin(), e.args.end(), [&](const auto& a) { return eval_atom(*a, g, atom); });
  }
  return false;
}

struct QueryBond {
  int a;  // earlier atom in parse order
  int b;
  std::unique_ptr<BondExpr> expr;
};

struct QueryAtom {
  std::unique_ptr<AtomExpr> expr;
  int parent = -1;  // earlier atom joined by the first bond, -1 starts a component
  std::vector<int> back_bonds;  // bonds to earlier atoms
};

// ---- parser --------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view s, std::vector<QueryAtom>& atoms, std::vector<QueryBond>& bonds)
      : s_(s), atoms_(atoms), bonds_(bonds) {}

  void parse() {
    if (s_.empty()) fail("empty pattern");
    for (;;) {
      chain(-1);
      if (peek() != '.') break;
      ++pos_;
    }
    if (pos_ != s_.size()) fail("unexpected character");
    for (const auto& [digit, open] : open_rings_) fail("unclosed ring " + std::to_string(digit));
  }

 private:
  struct OpenRing {
    int atom;
    std::unique_ptr<BondExpr> bond;
  };

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::InvalidConfig,
                "bad SMARTS '" + std::string(s_) + "' at " + std::to_string(pos_) + ": " + why);
  }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
  bool digit() const { return std::isdigit(static_cast<unsigned char>(peek())) != 0; }

  int number(int fallback) {
    if (!digit()) return fallback;
    int v = 0;
    while (digit()) v = v * 10 + (s_[pos_++] - '0');
    return v;
  }

  int add_atom(std::unique_ptr<AtomExpr> e, int prev, std::unique_ptr<BondExpr> b) {
    const int idx = static_cast<int>(atoms_.size());
    atoms_.push_back({std::move(e), prev, {}});
    if (prev >= 0) connect(prev, idx, std::move(b));
    return idx;
  }

  void connect(int a, int b, std::unique_ptr<BondExpr> e) {
    if (!e) e = std::make_unique<BondExpr>();
    atoms_[static_cast<std::size_t>(b)].back_bonds.push_back(static_cast<int>(bonds_.size()));
    bonds_.push_back({a, b, std::move(e)});
  }

  // One component or branch body; `prev` is the atom it hangs from.
  void chain(int prev) {
    int cur = -1;
    if (prev < 0) {
      cur = add_atom(atom(), -1, nullptr);
    } else {
      auto b = bond();
      cur = add_atom(atom(), prev, std::move(b));
    }
    for (;;) {
      const char c = peek();
      if (c == '\0' || c == ')' || c == '.') return;
      if (c == '(') {
        ++pos_;
        chain(cur);
        if (peek() != ')') fail("unclosed branch");
        ++pos_;
        continue;
      }
      auto b = bond();
      if (digit() || peek() == '%') {
        ring_closure(cur, std::move(b));
        continue;
      }
      if (peek() == '\0' || peek() == ')' || peek() == '.' || peek() == '(') fail("dangling bond");
      cur = add_atom(atom(), cur, std::move(b));
    }
  }

  void ring_closure(int atom, std::unique_ptr<BondExpr> b) {
    int digit_value = 0;
    if (peek() == '%') {
      ++pos_;
      if (!digit() || !std::isdigit(static_cast<unsigned char>(peek(1)))) fail("bad ring number");
      digit_value = (s_[pos_] - '0') * 10 + (s_[pos_ + 1] - '0');
      pos_ += 2;
    } else {
      digit_value = s_[pos_++] - '0';
    }
    auto it = open_rings_.find(digit_value);
    if (it == open_rings_.end()) {
      open_rings_.emplace(digit_value, OpenRing{atom, std::move(b)});
      return;
    }
    OpenRing open = std::move(it->second);
    open_rings_.erase(it);
    if (open.atom == atom) fail("ring closes on itself");
    connect(open.atom, atom, b ? std::move(b) : std::move(open.bond));
  }

  static bool bond_char(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~' || c == '@' || c == '/' || c == '\\' ||
           c == '!' || c == '&' || c == ',' || c == ';';
  }

  // Empty means the default bond.
  std::unique_ptr<BondExpr> bond() {
    if (!bond_char(peek())) return nullptr;
    return bond_low();
  }

  template <class E>
  static std::unique_ptr<E> combine(typename E::Kind k, std::vector<std::unique_ptr<E>> parts) {
    if (parts.size() == 1) return std::move(parts[0]);
    auto e = std::make_unique<E>();
    e->kind = k;
    e->args = std::move(parts);
    return e;
  }

  std::unique_ptr<BondExpr> bond_low() {
    std::vector<std::unique_ptr<BondExpr>> parts;
    parts.push_back(bond_or());
    while (peek() == ';') {
      ++pos_;
      parts.push_back(bond_or());
    }
    return combine<BondExpr>(BondExpr::And, std::move(parts));
  }

  std::unique_ptr<BondExpr> bond_or() {
    std::vector<std::unique_ptr<BondExpr>> parts;
    parts.push_back(bond_and());
    while (peek() == ',') {
      ++pos_;
      parts.push_back(bond_and());
    }
    return combine<BondExpr>(BondExpr::Or, std::move(parts));
  }

  std::unique_ptr<BondExpr> bond_and() {
    std::vector<std::unique_ptr<BondExpr>> parts;
    for (;;) {
      if (peek() == '&') {
        ++pos_;
        continue;
      }
      if (!bond_char(peek()) || peek() == ',' || peek() == ';') break;
      parts.push_back(bond_unary());
    }
    if (parts.empty()) fail("empty bond expression");
    return combine<BondExpr>(BondExpr::And, std::move(parts));
  }

  std::unique_ptr<BondExpr> bond_unary() {
    auto e = std::make_unique<BondExpr>();
    const char c = s_[pos_++];
    switch (c) {
      case '!':
        e->kind = BondExpr::Not;
        if (!bond_char(peek()) || peek() == '&' || peek() == ',' || peek() == ';') fail("bad bond negation");
        e->args.push_back(bond_unary());
        return e;
      case '-':
      case '/':
      case '\\': e->kind = BondExpr::Single; return e;
      case '=': e->kind = BondExpr::Double; return e;
      case '#': e->kind = BondExpr::Triple; return e;
      case ':': e->kind = BondExpr::Aromatic; return e;
      case '~': e->kind = BondExpr::Any; return e;
      case '@': e->kind = BondExpr::Ring; return e;
      default: fail("bad bond primitive");
    }
  }

  static std::unique_ptr<AtomExpr> make(AtomExpr::Kind k, int v = 0, bool arom = false) {
    auto e = std::make_unique<AtomExpr>();
    e->kind = k;
    e->value = v;
    e->aromatic = arom;
    return e;
  }

  std::unique_ptr<AtomExpr> atom() {
    const char c = peek();
    if (c == '[') {
      ++pos_;
      bracket_start_ = pos_;
      auto e = atom_low();
      if (peek() != ']') fail("unclosed bracket atom");
      ++pos_;
      return e;
    }
    if (c == '*') {
      ++pos_;
      return make(AtomExpr::True);
    }
    if (c == 'a' || c == 'A') {
      ++pos_;
      return make(c == 'a' ? AtomExpr::Aromatic : AtomExpr::Aliphatic);
    }
    static constexpr std::string_view kOrganic[] = {"Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I"};
    for (const auto sym : kOrganic) {
      if (s_.substr(pos_, sym.size()) == sym) {
        pos_ += sym.size();
        return make(AtomExpr::Element, element_number(sym), false);
      }
    }
    static constexpr std::string_view kAromatic[] = {"b", "c", "n", "o", "p", "s"};
    for (const auto sym : kAromatic) {
      if (s_.substr(pos_, 1) == sym) {
        ++pos_;
        const std::string upper(1, static_cast<char>(std::toupper(static_cast<unsigned char>(sym[0]))));
        return make(AtomExpr::Element, element_number(upper), true);
      }
    }
    fail("expected an atom");
  }

  std::unique_ptr<AtomExpr> atom_low() {
    std::vector<std::unique_ptr<AtomExpr>> parts;
    parts.push_back(atom_or());
    while (peek() == ';') {
      ++pos_;
      parts.push_back(atom_or());
    }
    return combine<AtomExpr>(AtomExpr::And, std::move(parts));
  }

  std::unique_ptr<AtomExpr> atom_or() {
    std::vector<std::unique_ptr<AtomExpr>> parts;
    parts.push_back(atom_and());
    while (peek() == ',') {
      ++pos_;
      parts.push_back(atom_and());
    }
    return combine<AtomExpr>(AtomExpr::Or, std::move(parts));
  }

  std::unique_ptr<AtomExpr> atom_and() {
    std::vector<std::unique_ptr<AtomExpr>> parts;
    for (;;) {
      const char c = peek();
      if (c == '&') {
        ++pos_;
        continue;
      }
      if (c == '\0' || c == ';' || c == ',' || c == ']') break;
      parts.push_back(atom_unary());
    }
    if (parts.empty()) fail("empty atom expression");
    return combine<AtomExpr>(AtomExpr::And, std::move(parts));
  }

  std::unique_ptr<AtomExpr> atom_unary() {
    if (peek() == '!') {
      ++pos_;
      auto e = make(AtomExpr::Not);
      e->args.push_back(atom_unary());
      return e;
    }
    return primitive();
  }

  // Hydrogen as an element: "[H]", "[H+]", "[2H]" and similar.
  bool hydrogen_element() const {
    std::size_t p = bracket_start_;
    while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
    if (p != pos_ || peek() != 'H') return false;
    const char next = peek(1);
    return next == ']' || next == '+' || next == '-' || (p > bracket_start_ && !std::isdigit(static_cast<unsigned char>(next)));
  }

  std::unique_ptr<AtomExpr> primitive() {
    const char c = peek();
    if (digit()) return make(AtomExpr::Isotope, number(0));
    if (c == 'a' && peek(1) == 's') {
      pos_ += 2;
      return make(AtomExpr::Element, 33, true);
    }
    if (c == 'H' && hydrogen_element()) {
      ++pos_;
      return make(AtomExpr::AtomicNum, 1);
    }
    // Two-letter element symbols take precedence over a one-letter symbol
    // followed by a primitive.
    if (std::isupper(static_cast<unsigned char>(c))) {
      const char c2 = peek(1);
      if (std::islower(static_cast<unsigned char>(c2))) {
        const int z = element_number(s_.substr(pos_, 2));
        if (z > 0) {
          pos_ += 2;
          return make(AtomExpr::Element, z, false);
        }
      }
    }
    switch (c) {
      case '*': ++pos_; return make(AtomExpr::True);
      case 'a': ++pos_; return make(AtomExpr::Aromatic);
      case 'A': ++pos_; return make(AtomExpr::Aliphatic);
      case '#': {
        ++pos_;
        const int z = number(-1);
        if (z < 0) fail("'#' needs a number");
        return make(AtomExpr::AtomicNum, z);
      }
      case 'H': ++pos_; return make(AtomExpr::TotalH, number(1));
      case 'h': ++pos_; return make(AtomExpr::ImplicitH, number(-1));
      case 'D': ++pos_; return make(AtomExpr::Degree, number(1));
      case 'X': ++pos_; return make(AtomExpr::TotalDegree, number(1));
      case 'v': ++pos_; return make(AtomExpr::Valence, number(1));
      case 'x': ++pos_; return make(AtomExpr::RingBonds, number(-1));
      case 'R': {
        ++pos_;
        const int n = number(-1);
        return n < 0 ? make(AtomExpr::InRing) : make(AtomExpr::RingCount, n);
      }
      case 'r': {
        ++pos_;
        const int n = number(-1);
        return n < 0 ? make(AtomExpr::InRing) : make(AtomExpr::RingSize, n);
      }
      case '+':
      case '-': {
        ++pos_;
        int n = 1;
        if (digit()) {
          n = number(1);
        } else {
          while (peek() == c) {
            ++pos_;
            ++n;
          }
        }
        return make(AtomExpr::Charge, c == '+' ? n : -n);
      }
      case '@': {
        while (peek() == '@') ++pos_;
        return make(AtomExpr::True);
      }
      case '$': {
        ++pos_;
        if (peek() != '(') fail("'$' needs a group");
        const std::size_t start = ++pos_;
        int depth = 1;
        while (pos_ < s_.size() && depth > 0) {
          if (s_[pos_] == '(') ++depth;
          if (s_[pos_] == ')') --depth;
          ++pos_;
        }
        if (depth != 0) fail("unclosed recursive group");
        auto e = make(AtomExpr::Recursive);
        e->sub = std::make_unique<Pattern>(s_.substr(start, pos_ - 1 - start));
        e->slot = next_memo_slot++;
        return e;
      }
      default: break;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      const int z = element_number(s_.substr(pos_, 1));
      if (z > 0) {
        ++pos_;
        return make(AtomExpr::Element, z, false);
      }
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      static constexpr std::string_view kAromatic[] = {"se", "te", "as", "b", "c", "n", "o", "p", "s"};
      for (const auto sym : kAromatic) {
        if (s_.substr(pos_, sym.size()) == sym) {
          pos_ += sym.size();
          std::string upper(sym);
          upper[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(upper[0])));
          return make(AtomExpr::Element, element_number(upper), true);
        }
      }
    }
    fail("unknown atom primitive");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t bracket_start_ = 0;
  std::vector<QueryAtom>& atoms_;
  std::vector<QueryBond>& bonds_;
  std::map<int, OpenRing> open_rings_;
};

// Atomic numbers an atom expression can match; all set when unconstrained.
std::bitset<128> possible_elements(const AtomExpr& e) {
  std::bitset<128> b;
  switch (e.kind) {
    case AtomExpr::Element:
    case AtomExpr::AtomicNum:
      if (e.value >= 0 && e.value < 128) b.set(static_cast<std::size_t>(e.value));
      return b;
    case AtomExpr::And:
      b.set();
      for (const auto& a : e.args) b &= possible_elements(*a);
      return b;
    case AtomExpr::Or:
      for (const auto& a : e.args) b |= possible_elements(*a);
      return b;
    default: return b.set();
  }
}

}  // namespace

// ---- matcher -------------------------------------------------------------

struct Pattern::Impl {
  std::string text;
  std::vector<QueryAtom> atoms;
  std::vector<QueryBond> bonds;
  // Element sets of constrained query atoms; each must meet the graph.
  std::vector<std::bitset<128>> required;

  // Extends the partial mapping `map[0..i)`; stops when `found` returns true.
  template <class Found>
  bool search(const Graph& g, int* map, std::size_t i, Found& found) const {
    if (i == atoms.size()) return found();
    const QueryAtom& q = atoms[i];
    auto try_atom = [&](int cand) {
      if (std::find(map, map + i, cand) != map + i) return false;
      if (!eval_atom(*q.expr, g, cand)) return false;
      for (int bi : q.back_bonds) {
        const QueryBond& qb = bonds[static_cast<std::size_t>(bi)];
        const int gb = g.find_bond(map[qb.a], cand);
        if (gb < 0 || !eval_bond(*qb.expr, g.bond(gb))) return false;
      }
      map[i] = cand;
      return search(g, map, i + 1, found);
    };
    if (q.parent >= 0) {
      for (const auto& e : g.edges(map[q.parent])) {
        if (try_atom(e.to)) return true;
      }
    } else {
      for (int cand = 0; cand < g.atom_count(); ++cand) {
        if (try_atom(cand)) return true;
      }
    }
    return false;
  }

  // Runs the search with `found(map)`; `first` pins query atom 0 when >= 0.
  template <class Found>
  bool run(const Graph& g, int first, Found found) const {
    for (const auto& r : required) {
      if ((r & g.elements()).none()) return false;
    }
    if (first >= 0 && !eval_atom(*atoms[0].expr, g, first)) return false;
    std::array<int, 32> small{};
    std::vector<int> large;
    int* map = small.data();
    if (atoms.size() > small.size()) {
      large.resize(atoms.size());
      map = large.data();
    }
    auto done = [&] { return found(map); };
    if (first < 0) return search(g, map, 0, done);
    map[0] = first;
    return search(g, map, 1, done);
  }
};

Pattern::Pattern(std::string_view smarts) : impl_(std::make_unique<Impl>()) {
  impl_->text = std::string(smarts);
  Parser(impl_->text, impl_->atoms, impl_->bonds).parse();
  for (const auto& q : impl_->atoms) {
    auto r = possible_elements(*q.expr);
    if (!r.all()) impl_->required.push_back(r);
  }
}

Pattern::~Pattern() = default;
Pattern::Pattern(Pattern&&) noexcept = default;
Pattern& Pattern::operator=(Pattern&&) noexcept = default;

const std::string& Pattern::text() const noexcept { return impl_->text; }

bool Pattern::matches(const Graph& g) const {
  return impl_->run(g, -1, [](const int*) { return true; });
}

bool Pattern::matches_at(const Graph& g, int atom) const {
  return impl_->run(g, atom, [](const int*) { return true; });
}

int Pattern::count_unique(const Graph& g) const {
  std::set<std::vector<int>> seen;
  impl_->run(g, -1, [&](const int* map) {
    std::vector<int> key(map, map + impl_->atoms.size());
    std::sort(key.begin(), key.end());
    seen.insert(std::move(key));
    return false;
  });
  return static_cast<int>(seen.size());
}

}  // namespace qevo::chem::smarts

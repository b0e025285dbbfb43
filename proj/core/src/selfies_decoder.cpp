#include "qevo/selfies_decoder.hpp"

#include <algorithm>
#include <array>

#include "qevo/error.hpp"
#include "qevo/rings.hpp"

namespace qevo::selfies {

namespace {

// Index alphabet of the pinned grammar; any other token reads as 0.
constexpr std::array<std::string_view, 16> kIndexAlphabet = {
    "[C]",  "[Ring1]",   "[Ring2]",   "[Branch1]", "[=Branch1]", "[#Branch1]", "[Branch2]", "[=Branch2]",
    "[#Branch2]", "[O]", "[N]",       "[=N]",      "[=C]",       "[#C]",       "[S]",       "[P]"};

std::uint8_t index_value(std::string_view token) {
  for (std::size_t i = 0; i < kIndexAlphabet.size(); ++i) {
    if (kIndexAlphabet[i] == token) return static_cast<std::uint8_t>(i);
  }
  return 0;
}

std::uint8_t bond_prefix(std::string_view& body) {
  if (!body.empty() && body.front() == '=') {
    body.remove_prefix(1);
    return 2;
  }
  if (!body.empty() && body.front() == '#') {
    body.remove_prefix(1);
    return 3;
  }
  return 1;
}

[[noreturn]] void unknown(std::string_view token) {
  throw Error(Errc::UnknownToken, "unsupported SELFIES token '" + std::string(token) + "'");
}

}  // namespace

Symbol parse_symbol(std::string_view token) {
  if (token.size() < 3 || token.front() != '[' || token.back() != ']') unknown(token);
  Symbol s;
  s.index = index_value(token);
  std::string_view body = token.substr(1, token.size() - 2);
  if (body == "nop") return s;
  s.bond_order = bond_prefix(body);
  auto numbered = [&](std::string_view stem, SymbolKind kind) {
    if (body.size() == stem.size() + 1 && body.substr(0, stem.size()) == stem && body.back() >= '1' &&
        body.back() <= '3') {
      s.kind = kind;
      s.length = static_cast<std::uint8_t>(body.back() - '0');
      return true;
    }
    return false;
  };
  if (numbered("Branch", SymbolKind::Branch) || numbered("Ring", SymbolKind::Ring)) return s;
  s.kind = SymbolKind::Atom;
  if (body == "C") {
    s.element = chem::Element::C;
  } else if (body == "N") {
    s.element = chem::Element::N;
  } else if (body == "O") {
    s.element = chem::Element::O;
  } else if (body == "F") {
    s.element = chem::Element::F;
  } else if (body == "Cl") {
    s.element = chem::Element::Cl;
  } else {
    unknown(token);
  }
  return s;
}

SymbolTable::SymbolTable(const codec::TokenVocabulary& vocab) {
  for (const auto& t : vocab.tokens_by_code()) symbols_.push_back(parse_symbol(t));
}

void RawGraph::append_key(std::string& out) const {
  out.push_back(static_cast<char>(atoms.size()));
  for (auto e : atoms) out.push_back(static_cast<char>(e));
  for (const auto& b : bonds) {
    out.push_back(static_cast<char>(b.a));
    out.push_back(static_cast<char>(b.b));
    out.push_back(static_cast<char>(b.order));
  }
}

int Decoder::decode(std::span<const std::uint32_t> codes, const SymbolTable& table, RawGraph& out) {
  thread_local std::vector<Symbol> symbols;
  symbols.clear();
  for (auto c : codes) symbols.push_back(table[c]);
  return decode(std::span<const Symbol>(symbols), out);
}

int Decoder::decode(std::span<const Symbol> symbols, RawGraph& out) {
  symbols_ = symbols;
  cursor_ = 0;
  out_ = &out;
  out.atoms.clear();
  out.bonds.clear();
  bond_count_.clear();
  rings_.clear();

  derive(-1, 0, -1);
  const int read = static_cast<int>(std::min(cursor_, symbols.size()));

  // Ring bonds are formed after the main chain, in request order.
  for (const auto& r : rings_) {
    if (r.left == r.right) continue;
    const int lfree = chem::max_valence(out.atoms[static_cast<std::size_t>(r.left)]) -
                      bond_count_[static_cast<std::size_t>(r.left)];
    const int rfree = chem::max_valence(out.atoms[static_cast<std::size_t>(r.right)]) -
                      bond_count_[static_cast<std::size_t>(r.right)];
    if (lfree <= 0 || rfree <= 0) continue;
    const int order = std::min({r.order, lfree, rfree});
    const int lo = std::min(r.left, r.right), hi = std::max(r.left, r.right);
    auto existing = std::find_if(out.bonds.begin(), out.bonds.end(),
                                 [&](const chem::Bond& b) { return b.a == lo && b.b == hi; });
    if (existing != out.bonds.end()) {
      const int updated = std::min(order + existing->order, 3);
      bond_count_[static_cast<std::size_t>(lo)] += updated - existing->order;
      bond_count_[static_cast<std::size_t>(hi)] += updated - existing->order;
      existing->order = static_cast<std::uint8_t>(updated);
    } else {
      out.bonds.push_back({lo, hi, static_cast<std::uint8_t>(order), false});
      bond_count_[static_cast<std::size_t>(lo)] += order;
      bond_count_[static_cast<std::size_t>(hi)] += order;
    }
  }
  return read;
}

int Decoder::read_index(int n) {
  int value = 0;
  for (int i = 0; i < n; ++i) {
    int digit = 0;
    if (cursor_ < symbols_.size()) digit = symbols_[cursor_].index;
    ++cursor_;
    value = value * 16 + digit;
  }
  return value;
}

// Mirrors the reference derivation: `state` is the remaining bonding
// capacity of the previous atom, 0 at a root and -1 once exhausted.
// max_derive < 0 means unbounded.
int Decoder::derive(int max_derive, int init_state, int root) {
  int n_derived = 0;
  int state = init_state;
  int prev = root;
  auto more = [&] { return max_derive < 0 || n_derived < max_derive; };

  while (state >= 0 && more()) {
    if (cursor_ >= symbols_.size()) break;
    const Symbol& s = symbols_[cursor_++];
    ++n_derived;
    int next_state = state;

    switch (s.kind) {
      case SymbolKind::Branch: {
        if (state > 1) {
          const int binit = std::min(state - 1, static_cast<int>(s.bond_order));
          next_state = state - binit;
          const int q = read_index(s.length);
          n_derived += s.length + derive(q + 1, binit, prev);
        }
        break;
      }
      case SymbolKind::Ring: {
        if (state != 0) {
          const int order = std::min(static_cast<int>(s.bond_order), state);
          next_state = state - order == 0 ? -1 : state - order;
          const int q = read_index(s.length);
          n_derived += s.length;
          rings_.push_back({std::max(0, prev - (q + 1)), prev, order});
        }
        break;
      }
      case SymbolKind::Nop:
        break;
      case SymbolKind::Atom: {
        const int cap = chem::max_valence(s.element);
        const int order = state == 0 ? 0 : std::min({static_cast<int>(s.bond_order), state, cap});
        next_state = cap - order == 0 ? -1 : cap - order;
        const int idx = static_cast<int>(out_->atoms.size());
        out_->atoms.push_back(s.element);
        bond_count_.push_back(0);
        if (order > 0) {
          out_->bonds.push_back({prev, idx, static_cast<std::uint8_t>(order), false});
          bond_count_[static_cast<std::size_t>(prev)] += order;
          bond_count_[static_cast<std::size_t>(idx)] += order;
        }
        prev = idx;
        break;
      }
    }
    if (next_state < 0) break;
    state = next_state;
  }

  // Remaining tokens of a bounded branch are consumed without effect.
  if (max_derive >= 0) {
    while (n_derived < max_derive && cursor_ < symbols_.size()) {
      ++cursor_;
      ++n_derived;
    }
  }
  return n_derived;
}

chem::MoleculeGraph finalize(const RawGraph& raw) {
  if (raw.atoms.empty()) return chem::MoleculeGraph::invalid("empty graph");
  std::vector<chem::Atom> atoms;
  atoms.reserve(raw.atoms.size());
  for (auto e : raw.atoms) atoms.push_back({e, 0, false});
  chem::MoleculeGraph g(std::move(atoms), raw.bonds);
  g.assign_implicit_hydrogens();
  const auto rings = chem::find_rings(g);
  chem::perceive_aromaticity(g, rings);
  return g;
}

chem::MoleculeGraph decode_molecule(std::span<const std::string> tokens) {
  std::vector<Symbol> symbols;
  symbols.reserve(tokens.size());
  for (const auto& t : tokens) symbols.push_back(parse_symbol(t));
  Decoder dec;
  RawGraph raw;
  dec.decode(std::span<const Symbol>(symbols), raw);
  return finalize(raw);
}

chem::MoleculeGraph decode_molecule(std::string_view selfies) {
  const auto tokens = codec::split_selfies(selfies);
  return decode_molecule(std::span<const std::string>(tokens));
}

chem::MoleculeGraph decode_bitstring(std::string_view bits, const codec::TokenVocabulary& vocab) {
  return decode_molecule(codec::decode_bits(bits, vocab));
}

}  // namespace qevo::selfies

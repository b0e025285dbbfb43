#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qevo/molecule.hpp"
#include "qevo/token_codec.hpp"

namespace qevo::selfies {

enum class SymbolKind : std::uint8_t { Atom, Branch, Ring, Nop };

/// Grammar role of one token.
struct Symbol {
  SymbolKind kind = SymbolKind::Nop;
  chem::Element element = chem::Element::C;
  std::uint8_t bond_order = 1;  // atoms, branches (branch bond type), rings
  std::uint8_t length = 1;      // number of index tokens for branches and rings
  std::uint8_t index = 0;       // value as an index symbol
};

/// Parses a supported token; throws UnknownToken otherwise.
Symbol parse_symbol(std::string_view token);

/// Grammar roles of a vocabulary, indexed by code.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(const codec::TokenVocabulary& vocab);
  const Symbol& operator[](std::uint32_t code) const { return symbols_[code]; }
  std::size_t size() const noexcept { return symbols_.size(); }

 private:
  std::vector<Symbol> symbols_;
};

/// Decoded atoms and bonds before hydrogen assignment and aromaticity.
struct RawGraph {
  std::vector<chem::Element> atoms;
  std::vector<chem::Bond> bonds;

  /// Compact byte key; identical keys imply identical molecules.
  void append_key(std::string& out) const;
};

/// Reusable decoder with scratch buffers (one per thread).
class Decoder {
 public:
  /// Decodes `codes`; returns the number of leading tokens that were read.
  /// Every sequence sharing those tokens decodes to the same graph.
  int decode(std::span<const std::uint32_t> codes, const SymbolTable& table, RawGraph& out);
  int decode(std::span<const Symbol> symbols, RawGraph& out);

 private:
  int derive(int max_derive, int init_state, int root);
  int read_index(int n);

  struct Ring {
    int left;
    int right;
    int order;
  };

  std::span<const Symbol> symbols_;
  std::size_t cursor_ = 0;
  RawGraph* out_ = nullptr;
  std::vector<int> bond_count_;
  std::vector<Ring> rings_;
};

/// Adds implicit hydrogens and perceives aromaticity. An empty raw graph
/// becomes the Invalid molecule.
chem::MoleculeGraph finalize(const RawGraph& raw);

/// Full pipeline for a token sequence.
chem::MoleculeGraph decode_molecule(std::span<const std::string> tokens);
chem::MoleculeGraph decode_molecule(std::string_view selfies);

/// Decodes a molecule bitstring under a vocabulary.
chem::MoleculeGraph decode_bitstring(std::string_view bits, const codec::TokenVocabulary& vocab);

}  // namespace qevo::selfies

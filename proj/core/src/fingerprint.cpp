#include "qevo/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <tuple>

#include "qevo/error.hpp"
#include "qevo/rings.hpp"

namespace qevo::chem {

std::uint64_t fnv1a64(const void* data, std::size_t size) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

int Fingerprint::popcount() const {
  int n = 0;
  for (auto w : words) n += std::popcount(w);
  return n;
}

Fingerprint fingerprint(const MoleculeGraph& g, int radius, int width) {
  if (width <= 0 || radius < 0) throw Error(Errc::InvalidConfig, "fingerprint width and radius must be positive");
  Fingerprint fp;
  fp.width = width;
  fp.radius = radius;
  fp.words.assign(static_cast<std::size_t>((width + 63) / 64), 0);
  if (!g.valid()) return fp;

  const auto n = static_cast<std::size_t>(g.atom_count());
  const auto rings = find_rings(g);
  auto set_bit = [&](std::uint64_t h) {
    const auto bit = h % static_cast<std::uint64_t>(width);
    fp.words[bit / 64] |= std::uint64_t{1} << (bit % 64);
  };

  // Radius 0: atom invariants in the Daylight style.
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& at = g.atoms()[i];
    const std::string env = "r0|Z" + std::to_string(atomic_number(at.element)) + "|D" +
                            std::to_string(g.heavy_degree(static_cast<int>(i))) + "|H" +
                            std::to_string(at.hydrogens) + "|V" + std::to_string(g.bond_order_sum(static_cast<int>(i))) +
                            (at.aromatic ? "|a" : "|A") + (rings.atom_in_ring[i] ? "|R" : "|-");
    ids[i] = fnv1a64(env.data(), env.size());
    set_bit(ids[i]);
  }
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<int, std::uint64_t>> nb;
      for (const auto& x : g.neighbors(static_cast<int>(i))) {
        const auto& b = g.bonds()[static_cast<std::size_t>(x.bond)];
        nb.emplace_back(b.aromatic ? 4 : b.order, ids[static_cast<std::size_t>(x.atom)]);
      }
      std::sort(nb.begin(), nb.end());
      std::string env = "r" + std::to_string(r) + "|" + std::to_string(ids[i]);
      for (const auto& [bt, id] : nb) env += "|" + std::to_string(bt) + ":" + std::to_string(id);
      next[i] = fnv1a64(env.data(), env.size());
      set_bit(next[i]);
    }
    ids = std::move(next);
  }
  return fp;
}

namespace {

void hash_combine(std::uint32_t& seed, std::uint32_t v) { seed ^= v + 0x9e3779b9U + (seed << 6) + (seed >> 2); }

// Bond type codes 1, 2, 3 and 12 (aromatic); a triple bond inside an
// aromatic ring keeps code 3.
std::uint32_t bond_code(const Bond& b) { return b.aromatic && b.order != 3 ? 12 : b.order; }

}  // namespace

std::map<std::uint32_t, int> morgan_counts(const MoleculeGraph& g, int radius) {
  if (radius < 0) throw Error(Errc::InvalidConfig, "fingerprint radius must be nonnegative");
  std::map<std::uint32_t, int> out;
  if (!g.valid()) return out;
  const auto n = static_cast<std::size_t>(g.atom_count());
  const auto nwords = static_cast<std::size_t>((g.bond_count() + 63) / 64);
  const auto rings = find_rings(g);

  // Atomic number, total degree, hydrogens, charge, mass shift, ring flag.
  std::vector<std::uint32_t> cur(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& at = g.atoms()[i];
    std::uint32_t h = 0;
    hash_combine(h, static_cast<std::uint32_t>(atomic_number(at.element)));
    hash_combine(h, static_cast<std::uint32_t>(g.heavy_degree(static_cast<int>(i)) + at.hydrogens));
    hash_combine(h, at.hydrogens);
    hash_combine(h, 0);
    hash_combine(h, 0);
    if (rings.atom_in_ring[i]) hash_combine(h, 1);
    cur[i] = h;
    ++out[h];
  }

  using Bits = std::vector<std::uint64_t>;
  std::vector<Bits> env(n, Bits(nwords, 0));
  std::vector<Bits> seen;
  std::vector<char> dead(n, 0);
  for (int layer = 0; layer < radius; ++layer) {
    std::vector<std::uint32_t> next = cur;
    std::vector<Bits> next_env = env;
    std::vector<std::tuple<Bits, std::uint32_t, std::size_t>> round;
    for (std::size_t i = 0; i < n; ++i) {
      if (dead[i]) continue;
      if (g.neighbors(static_cast<int>(i)).empty()) {
        dead[i] = 1;
        continue;
      }
      std::vector<std::pair<std::uint32_t, std::uint32_t>> nb;
      for (const auto& x : g.neighbors(static_cast<int>(i))) {
        auto& e = next_env[i];
        e[static_cast<std::size_t>(x.bond) / 64] |= std::uint64_t{1} << (x.bond % 64);
        const auto& other = env[static_cast<std::size_t>(x.atom)];
        for (std::size_t w = 0; w < nwords; ++w) e[w] |= other[w];
        nb.emplace_back(bond_code(g.bonds()[static_cast<std::size_t>(x.bond)]), cur[static_cast<std::size_t>(x.atom)]);
      }
      std::sort(nb.begin(), nb.end());
      std::uint32_t h = static_cast<std::uint32_t>(layer);
      hash_combine(h, cur[i]);
      for (const auto& [bt, id] : nb) {
        std::uint32_t pair = 0;
        hash_combine(pair, bt);
        hash_combine(pair, id);
        hash_combine(h, pair);
      }
      next[i] = h;
      round.emplace_back(next_env[i], h, i);
    }
    // Equal bond sets keep the smallest identifier.
    std::sort(round.begin(), round.end());
    for (const auto& [bits, id, atom] : round) {
      if (std::find(seen.begin(), seen.end(), bits) != seen.end()) {
        dead[atom] = 1;
      } else {
        ++out[id];
        seen.push_back(bits);
      }
    }
    cur = std::move(next);
    env = std::move(next_env);
  }
  return out;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width != b.width || a.words.size() != b.words.size()) {
    throw Error(Errc::WidthMismatch, "fingerprint widths differ (" + std::to_string(a.width) + " vs " +
                                         std::to_string(b.width) + ")");
  }
  int both = 0, either = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) {
    both += std::popcount(a.words[i] & b.words[i]);
    either += std::popcount(a.words[i] | b.words[i]);
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace qevo::chem

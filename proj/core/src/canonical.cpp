#include "qevo/canonical.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <tuple>

#include "qevo/error.hpp"

namespace qevo::chem {

namespace {

// Search-tree leaves explored before falling back to the first branch.
// Equivalent atoms give equal strings, so the cap only matters for large
// symmetric molecules.
constexpr int kLeafBudget = 4096;

int bond_code(const Bond& b) { return b.aromatic ? 4 : b.order; }

// Renumbers `keys` to dense class ids ordered by key.
template <typename Key>
int dense_rank(const std::vector<Key>& keys, std::vector<int>& cls) {
  const std::size_t n = keys.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)]; });
  cls.assign(n, 0);
  int id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && keys[static_cast<std::size_t>(order[i - 1])] < keys[static_cast<std::size_t>(order[i])]) ++id;
    cls[static_cast<std::size_t>(order[i])] = id;
  }
  return n == 0 ? 0 : id + 1;
}

// Refines `cls` to equitable partition. Existing class order is preserved.
int refine(const MoleculeGraph& g, std::vector<int>& cls) {
  const std::size_t n = cls.size();
  int count = 0;
  {
    std::vector<int> tmp;
    count = dense_rank(cls, tmp);
    cls = tmp;
  }
  std::vector<std::vector<int>> keys(n);
  while (true) {
    for (std::size_t a = 0; a < n; ++a) {
      auto& k = keys[a];
      k.clear();
      k.push_back(cls[a]);
      std::vector<int> nb;
      for (const auto& x : g.neighbors(static_cast<int>(a))) {
        nb.push_back(cls[static_cast<std::size_t>(x.atom)] * 8 + bond_code(g.bonds()[static_cast<std::size_t>(x.bond)]));
      }
      std::sort(nb.begin(), nb.end());
      k.insert(k.end(), nb.begin(), nb.end());
    }
    std::vector<int> next;
    const int next_count = dense_rank(keys, next);
    cls = std::move(next);
    if (next_count == count) break;
    count = next_count;
  }
  return count;
}

std::string atom_label(const MoleculeGraph& g, int i) {
  const Atom& at = g.atoms()[static_cast<std::size_t>(i)];
  std::string sym(symbol(at.element));
  int implied = 0;
  if (at.aromatic) {
    int arom = 0, other = 0;
    for (const auto& nb : g.neighbors(i)) {
      const auto& b = g.bonds()[static_cast<std::size_t>(nb.bond)];
      if (b.aromatic) {
        ++arom;
      } else {
        other += b.order;
      }
    }
    implied = std::max(0, max_valence(at.element) - arom - 1 - other);
    sym[0] = static_cast<char>(sym[0] - 'A' + 'a');
  } else {
    implied = std::max(0, max_valence(at.element) - g.bond_order_sum(i));
  }
  if (at.hydrogens == implied) return sym;
  std::string out = "[" + sym;
  if (at.hydrogens > 0) out += "H";
  if (at.hydrogens > 1) out += std::to_string(at.hydrogens);
  return out + "]";
}

std::string bond_symbol(const MoleculeGraph& g, const Bond& b) {
  if (b.aromatic) return "";
  switch (b.order) {
    case 2: return "=";
    case 3: return "#";
    default: break;
  }
  const bool both_aromatic = g.atoms()[static_cast<std::size_t>(b.a)].aromatic &&
                             g.atoms()[static_cast<std::size_t>(b.b)].aromatic;
  return both_aromatic ? "-" : "";
}

std::string ring_digit(int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); }

// Depth-first string from a discrete ranking (rank[i] unique).
std::string write_string(const MoleculeGraph& g, const std::vector<int>& rank) {
  const auto n = static_cast<std::size_t>(g.atom_count());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]; });

  std::vector<std::vector<int>> sorted_nb(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (const auto& x : g.neighbors(static_cast<int>(a))) sorted_nb[a].push_back(x.atom);
    std::sort(sorted_nb[a].begin(), sorted_nb[a].end(), [&](int x, int y) { return rank[static_cast<std::size_t>(x)] < rank[static_cast<std::size_t>(y)]; });
  }

  // Pass 1: DFS tree and ring-closure edges.
  std::vector<int> parent(n, -1), visit(n, -1);
  std::vector<std::vector<int>> children(n);
  std::vector<std::vector<int>> closures(n);  // partner atoms, in emission order
  int clock = 0;
  std::vector<std::pair<int, std::size_t>> stack;
  const int root = order[0];
  visit[static_cast<std::size_t>(root)] = clock++;
  stack.emplace_back(root, 0);
  while (!stack.empty()) {
    auto& [a, pos] = stack.back();
    const auto& nb = sorted_nb[static_cast<std::size_t>(a)];
    if (pos == nb.size()) {
      stack.pop_back();
      continue;
    }
    const int b = nb[pos++];
    if (b == parent[static_cast<std::size_t>(a)]) continue;
    if (visit[static_cast<std::size_t>(b)] < 0) {
      visit[static_cast<std::size_t>(b)] = clock++;
      parent[static_cast<std::size_t>(b)] = a;
      children[static_cast<std::size_t>(a)].push_back(b);
      stack.emplace_back(b, 0);
    } else if (visit[static_cast<std::size_t>(b)] < visit[static_cast<std::size_t>(a)]) {
      // Back edge a -> b: opened at b, closed at a.
      closures[static_cast<std::size_t>(b)].push_back(a);
      closures[static_cast<std::size_t>(a)].push_back(b);
    }
  }

  // Pass 2: emit.
  std::string out;
  std::vector<int> open_digit(n * n, 0);  // keyed by (min,max) atom pair
  std::vector<char> digit_used(100, 0);
  auto key = [n](int x, int y) { return static_cast<std::size_t>(std::min(x, y)) * n + static_cast<std::size_t>(std::max(x, y)); };

  std::vector<std::pair<int, int>> work;  // (atom, 0) or (-1, 1 for ')' / 2 for '(')
  work.emplace_back(root, 0);
  while (!work.empty()) {
    auto [a, phase] = work.back();
    work.pop_back();
    if (phase == 1) {
      out += ')';
      continue;
    }
    if (phase == 2) {
      out += '(';
      continue;
    }
    const auto ua = static_cast<std::size_t>(a);
    if (parent[ua] >= 0) {
      out += bond_symbol(g, g.bonds()[static_cast<std::size_t>(g.find_bond(parent[ua], a))]);
    }
    out += atom_label(g, a);
    for (int partner : closures[ua]) {
      const auto k = key(a, partner);
      if (open_digit[k] == 0) {
        int d = 1;
        while (digit_used[static_cast<std::size_t>(d)]) ++d;
        digit_used[static_cast<std::size_t>(d)] = 1;
        open_digit[k] = d;
        out += bond_symbol(g, g.bonds()[static_cast<std::size_t>(g.find_bond(a, partner))]);
        out += ring_digit(d);
      } else {
        out += ring_digit(open_digit[k]);
        digit_used[static_cast<std::size_t>(open_digit[k])] = 0;
      }
    }
    const auto& ch = children[ua];
    // Push in reverse so the first child is emitted first; all but the last
    // child are wrapped in parentheses.
    for (std::size_t i = ch.size(); i-- > 0;) {
      if (i + 1 < ch.size()) {
        work.emplace_back(-1, 1);
        work.emplace_back(ch[i], 0);
        work.emplace_back(-1, 2);
      } else {
        work.emplace_back(ch[i], 0);
      }
    }
  }
  return out;
}

struct Search {
  const MoleculeGraph& g;
  int leaves = 0;
  std::string best;
  bool have_best = false;

  void run(std::vector<int> cls) {
    const int count = refine(g, cls);
    const auto n = cls.size();
    if (count == static_cast<int>(n)) {
      ++leaves;
      std::string s = write_string(g, cls);
      if (!have_best || s < best) {
        best = std::move(s);
        have_best = true;
      }
      return;
    }
    // First non-singleton class (lowest id).
    std::vector<int> size(static_cast<std::size_t>(count), 0);
    for (int c : cls) ++size[static_cast<std::size_t>(c)];
    int target = 0;
    while (size[static_cast<std::size_t>(target)] < 2) ++target;
    bool first = true;
    for (std::size_t a = 0; a < n; ++a) {
      if (cls[a] != target) continue;
      if (!first && leaves >= kLeafBudget) break;
      first = false;
      std::vector<int> next(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = cls[i] * 2 + (cls[i] > target ? 1 : 0);
      next[a] = target * 2;  // individualised atom sorts before its cell mates
      for (std::size_t i = 0; i < n; ++i) {
        if (i != a && cls[i] == target) next[i] = target * 2 + 1;
      }
      run(std::move(next));
    }
  }
};

}  // namespace

std::vector<int> refine_classes(const MoleculeGraph& g) {
  const auto n = static_cast<std::size_t>(g.atom_count());
  std::vector<std::tuple<int, int, int, int, int>> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& at = g.atoms()[i];
    inv[i] = {g.heavy_degree(static_cast<int>(i)), atomic_number(at.element), at.aromatic ? 1 : 0, at.hydrogens,
              g.bond_order_sum(static_cast<int>(i))};
  }
  std::vector<int> cls;
  dense_rank(inv, cls);
  refine(g, cls);
  return cls;
}

CanonicalForm canonicalize(const MoleculeGraph& g) {
  if (!g.valid()) throw Error(Errc::InvalidMolecule, "cannot canonicalize an invalid molecule");
  Search s{g, 0, {}, false};
  s.run(refine_classes(g));
  return {std::move(s.best)};
}

}  // namespace qevo::chem

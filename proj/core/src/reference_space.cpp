#include "qevo/reference_space.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include "qevo/canonical.hpp"
#include "qevo/error.hpp"
#include "qevo/parallel.hpp"
#include "qevo/selfies_decoder.hpp"

namespace qevo {

namespace {

constexpr char kMagic[8] = {'Q', 'E', 'V', 'O', 'R', 'E', 'F', '2'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_string(std::ostream& os, const std::string& s) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw Error(Errc::Io, "truncated reference cache");
  return v;
}

std::string get_string(std::istream& is) {
  const auto n = get<std::uint32_t>(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw Error(Errc::Io, "truncated reference cache");
  return s;
}

std::string to_bits(std::uint64_t index, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i) s[i] = static_cast<char>('0' + ((index >> (width - 1 - i)) & 1));
  return s;
}

struct Partial {
  std::unordered_map<std::string, ReferenceEntry> entries;
  std::uint64_t invalid = 0;
};

// Enumerates indices [lo, hi) of a space of k tokens with n bits each.
void enumerate_range(const codec::TokenVocabulary& vocab, int k, std::uint64_t lo, std::uint64_t hi, Partial& out) {
  const int n = vocab.bits_per_token();
  const std::uint32_t mask = (1u << n) - 1;
  const selfies::SymbolTable table(vocab);
  selfies::Decoder decoder;
  selfies::RawGraph raw;
  std::vector<std::uint32_t> codes(static_cast<std::size_t>(k));
  // Raw graph key -> canonical entry (nullptr for invalid).
  std::unordered_map<std::string, ReferenceEntry*> memo;
  std::string key;
  std::uint64_t idx = lo;
  while (idx < hi) {
    for (int i = 0; i < k; ++i) codes[i] = static_cast<std::uint32_t>(idx >> (n * (k - 1 - i))) & mask;
    const int read = decoder.decode(codes, table, raw);
    // All indices sharing the first `read` tokens decode identically. The
    // block is aligned, so it never crosses a partition boundary that is a
    // multiple of the top-level block size.
    const std::uint64_t block = std::uint64_t{1} << (n * (k - read));
    const std::uint64_t count = std::min(block - (idx & (block - 1)), hi - idx);
    key.clear();
    raw.append_key(key);
    auto it = memo.find(key);
    if (it == memo.end()) {
      const auto g = selfies::finalize(raw);
      ReferenceEntry* entry = nullptr;
      if (g.valid()) {
        auto canonical = chem::canonicalize(g).text;
        auto [pos, fresh] = out.entries.try_emplace(canonical);
        if (fresh) {
          pos->second.canonical = std::move(canonical);
          pos->second.bits = to_bits(idx, k * n);
        }
        entry = &pos->second;
      }
      it = memo.emplace(key, entry).first;
    }
    if (it->second) {
      it->second->multiplicity += count;
    } else {
      out.invalid += count;
    }
    idx += count;
  }
}

bool rank_less(const ReferenceEntry& a, const ReferenceEntry& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.canonical < b.canonical;
}

}  // namespace

ReferenceSpace::ReferenceSpace(std::string vocabulary, int k, int bits_per_token, std::string scorer_id,
                               std::vector<ReferenceEntry> entries, std::uint64_t invalid_multiplicity)
    : vocabulary_(std::move(vocabulary)),
      k_(k),
      bits_per_token_(bits_per_token),
      scorer_id_(std::move(scorer_id)),
      entries_(std::move(entries)),
      invalid_multiplicity_(invalid_multiplicity) {
  std::sort(entries_.begin(), entries_.end(), rank_less);
  index();
}

void ReferenceSpace::index() {
  rank_.clear();
  rank_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) rank_.emplace(entries_[i].canonical, i);
}

std::uint64_t ReferenceSpace::total_multiplicity() const noexcept {
  std::uint64_t total = invalid_multiplicity_;
  for (const auto& e : entries_) total += e.multiplicity;
  return total;
}

std::vector<ReferenceEntry> ReferenceSpace::top_k(std::size_t n) const {
  n = std::min(n, entries_.size());
  return {entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n)};
}

long ReferenceSpace::rank_of(const std::string& canonical) const {
  const auto it = rank_.find(canonical);
  return it == rank_.end() ? -1 : static_cast<long>(it->second);
}

const ReferenceEntry* ReferenceSpace::find(const std::string& canonical) const {
  const long r = rank_of(canonical);
  return r < 0 ? nullptr : &entries_[static_cast<std::size_t>(r)];
}

void ReferenceSpace::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error(Errc::Io, "cannot write " + tmp);
    os.write(kMagic, sizeof kMagic);
    put_string(os, vocabulary_);
    put<std::int32_t>(os, k_);
    put<std::int32_t>(os, bits_per_token_);
    put_string(os, scorer_id_);
    put<std::uint64_t>(os, invalid_multiplicity_);
    put<std::uint64_t>(os, entries_.size());
    for (const auto& e : entries_) {
      put_string(os, e.canonical);
      put<double>(os, e.score);
      put<std::uint64_t>(os, e.multiplicity);
      put_string(os, e.bits);
    }
    if (!os) throw Error(Errc::Io, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

ReferenceSpace ReferenceSpace::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot open " + path.string());
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error(Errc::Io, path.string() + " is not a reference cache");
  ReferenceSpace ref;
  ref.vocabulary_ = get_string(is);
  ref.k_ = get<std::int32_t>(is);
  ref.bits_per_token_ = get<std::int32_t>(is);
  ref.scorer_id_ = get_string(is);
  ref.invalid_multiplicity_ = get<std::uint64_t>(is);
  const auto n = get<std::uint64_t>(is);
  ref.entries_.resize(n);
  for (auto& e : ref.entries_) {
    e.canonical = get_string(is);
    e.score = get<double>(is);
    e.multiplicity = get<std::uint64_t>(is);
    e.bits = get_string(is);
  }
  ref.index();
  return ref;
}

void ReferenceSpace::write_csv(const std::filesystem::path& path, std::size_t top_n) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error(Errc::Io, "cannot write " + path.string());
  os << "rank,canonical,score,multiplicity,bits\n";
  char buf[64];
  const auto top = top_k(top_n);
  for (std::size_t i = 0; i < top.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f", top[i].score);
    os << i + 1 << ',' << top[i].canonical << ',' << buf << ',' << top[i].multiplicity << ',' << top[i].bits << '\n';
  }
}

ReferenceSpace enumerate(const codec::TokenVocabulary& vocab, int k, const Scorer& scorer) {
  const int n = vocab.bits_per_token();
  if (k < 1) throw Error(Errc::InvalidConfig, "k must be at least 1");
  if (k * n > kMaxEnumerationBits) {
    throw Error(Errc::SpaceTooLarge, std::to_string(k * n) + " bits exceed the enumeration limit of " +
                                         std::to_string(kMaxEnumerationBits));
  }
  const std::uint64_t total = std::uint64_t{1} << (k * n);
  // Partition on whole leading-token blocks of up to two tokens.
  const int lead = std::min(k, 2);
  const std::uint64_t parts = std::uint64_t{1} << (lead * n);
  const std::uint64_t span = total / parts;
  std::vector<Partial> partials(parts);
  parallel_each(parts, [&](std::size_t p) {
    enumerate_range(vocab, k, p * span, (p + 1) * span, partials[p]);
  });

  std::unordered_map<std::string, ReferenceEntry> merged;
  std::uint64_t invalid = 0;
  for (auto& part : partials) {
    invalid += part.invalid;
    for (auto& [canonical, entry] : part.entries) {
      auto [it, fresh] = merged.try_emplace(canonical, std::move(entry));
      if (!fresh) {
        it->second.multiplicity += entry.multiplicity;
        it->second.bits = std::min(it->second.bits, entry.bits);
      }
    }
    part.entries.clear();
  }
  std::vector<ReferenceEntry> entries;
  entries.reserve(merged.size());
  for (auto& [canonical, entry] : merged) entries.push_back(std::move(entry));
  // Score each molecule once, from its lowest-index decoding.
  constexpr std::size_t kChunk = 1024;
  parallel_each((entries.size() + kChunk - 1) / kChunk, [&](std::size_t c) {
    const std::size_t end = std::min(entries.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      entries[i].score = scorer(selfies::decode_bitstring(entries[i].bits, vocab)).value;
    }
  });
  return ReferenceSpace(vocab.name(), k, n, scorer.id(), std::move(entries), invalid);
}

ReferenceSpace enumerate_cached(const codec::TokenVocabulary& vocab, int k, const Scorer& scorer,
                                const std::filesystem::path& cache) {
  if (std::filesystem::exists(cache)) {
    try {
      auto ref = ReferenceSpace::load(cache);
      if (ref.vocabulary() == vocab.name() && ref.tokens() == k && ref.scorer_id() == scorer.id()) return ref;
    } catch (const Error&) {
      // stale or damaged cache: rebuild below
    }
  }
  auto ref = enumerate(vocab, k, scorer);
  ref.save(cache);
  return ref;
}

}  // namespace qevo

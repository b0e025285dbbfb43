#include "qevo/token_codec.hpp"

#include <fstream>
#include <sstream>

#include "qevo/error.hpp"

namespace qevo::codec {

namespace {

// Table order of the two built-in mappings.
constexpr std::pair<const char*, const char*> kTable23[] = {
    {"[C]", "000"},     {"[O]", "001"},    {"[N]", "010"},     {"[F]", "011"},
    {"[=C]", "100"},    {"[#N]", "101"},   {"[Ring1]", "110"}, {"[Branch1]", "111"},
};

constexpr std::pair<const char*, const char*> kTable24[] = {
    {"[C]", "0000"},       {"[=C]", "1000"},      {"[#C]", "0100"},    {"[O]", "0010"},
    {"[=O]", "0001"},      {"[N]", "1100"},       {"[=N]", "0011"},    {"[#N]", "0110"},
    {"[F]", "1001"},       {"[Cl]", "1010"},      {"[Ring1]", "0101"}, {"[Ring2]", "1110"},
    {"[Branch1]", "0111"}, {"[=Branch1]", "1101"}, {"[Branch2]", "1011"}, {"[=Branch2]", "1111"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::uint32_t parse_code(std::string_view code) {
  std::uint32_t value = 0;
  for (char c : code) {
    if (c != '0' && c != '1') {
      throw Error(Errc::InvalidConfig, "bit code '" + std::string(code) + "' is not binary");
    }
    value = (value << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return value;
}

}  // namespace

TokenVocabulary TokenVocabulary::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs, std::string name) {
  if (pairs.empty()) throw Error(Errc::InvalidConfig, "vocabulary is empty");
  TokenVocabulary v;
  v.name_ = std::move(name);
  v.bits_ = static_cast<int>(pairs.front().second.size());
  if (v.bits_ < 1 || v.bits_ > 16) {
    throw Error(Errc::InvalidConfig, "bit codes must be 1..16 bits wide");
  }
  const std::size_t n_codes = std::size_t{1} << v.bits_;
  if (pairs.size() != n_codes) {
    throw Error(Errc::InvalidConfig, "vocabulary of width " + std::to_string(v.bits_) +
                                         " needs exactly " + std::to_string(n_codes) +
                                         " tokens, got " + std::to_string(pairs.size()));
  }
  v.by_code_.assign(n_codes, {});
  std::vector<bool> seen(n_codes, false);
  for (const auto& [token, code] : pairs) {
    if (static_cast<int>(code.size()) != v.bits_) {
      throw Error(Errc::InvalidConfig, "mixed code widths in vocabulary");
    }
    const std::uint32_t c = parse_code(code);
    if (seen[c]) throw Error(Errc::InvalidConfig, "duplicate bit code " + code);
    if (!v.by_token_.emplace(token, c).second) {
      throw Error(Errc::InvalidConfig, "duplicate token " + token);
    }
    seen[c] = true;
    v.by_code_[c] = token;
  }
  return v;
}

TokenVocabulary TokenVocabulary::parse(std::string_view text, std::string name) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos && hash == line.find_first_not_of(" \t")) {
      line = {};
    }
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.rfind('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw Error(Errc::InvalidConfig,
                    "vocabulary line " + std::to_string(line_no) + ": expected token=bitcode");
      }
      pairs.emplace_back(std::string(trim(line.substr(0, eq))),
                         std::string(trim(line.substr(eq + 1))));
    }
    start = end + 1;
  }
  return from_pairs(pairs, std::move(name));
}

TokenVocabulary TokenVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open vocabulary file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.stem().string());
}

bool TokenVocabulary::is_preset(std::string_view name) {
  return name == "table_2_3" || name == "table_2_4";
}

TokenVocabulary TokenVocabulary::preset(std::string_view name) {
  std::vector<std::pair<std::string, std::string>> pairs;
  if (name == "table_2_3") {
    for (const auto& [t, c] : kTable23) pairs.emplace_back(t, c);
  } else if (name == "table_2_4") {
    for (const auto& [t, c] : kTable24) pairs.emplace_back(t, c);
  } else {
    throw Error(Errc::UnknownPreset, "unknown vocabulary preset '" + std::string(name) + "'");
  }
  return from_pairs(pairs, std::string(name));
}

TokenVocabulary TokenVocabulary::resolve(std::string_view name_or_path) {
  if (is_preset(name_or_path)) return preset(name_or_path);
  return load(std::filesystem::path(std::string(name_or_path)));
}

bool TokenVocabulary::contains(std::string_view token) const {
  return by_token_.find(std::string(token)) != by_token_.end();
}

std::uint32_t TokenVocabulary::code_of(std::string_view token) const {
  const auto it = by_token_.find(std::string(token));
  if (it == by_token_.end()) {
    throw Error(Errc::UnknownToken, "token '" + std::string(token) + "' is not in vocabulary " + name_);
  }
  return it->second;
}

const std::string& TokenVocabulary::token_of(std::uint32_t code) const {
  if (code >= by_code_.size()) {
    throw Error(Errc::LengthMismatch, "code " + std::to_string(code) + " exceeds vocabulary width");
  }
  return by_code_[code];
}

std::string TokenVocabulary::code_string(std::uint32_t code) const {
  std::string s(static_cast<std::size_t>(bits_), '0');
  for (int i = 0; i < bits_; ++i) {
    if ((code >> (bits_ - 1 - i)) & 1u) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

std::string TokenVocabulary::to_text() const {
  std::string out;
  for (std::uint32_t c = 0; c < by_code_.size(); ++c) {
    out += by_code_[c] + "=" + code_string(c) + "\n";
  }
  return out;
}

MoleculeBitstring encode_tokens(std::span<const std::string> tokens, const TokenVocabulary& vocab,
                                std::size_t expected_length) {
  if (tokens.size() != expected_length) {
    throw Error(Errc::LengthMismatch, "expected " + std::to_string(expected_length) +
                                          " tokens, got " + std::to_string(tokens.size()));
  }
  return encode_tokens(tokens, vocab);
}

MoleculeBitstring encode_tokens(std::span<const std::string> tokens, const TokenVocabulary& vocab) {
  MoleculeBitstring out;
  out.bits_per_token = vocab.bits_per_token();
  out.bits.reserve(tokens.size() * static_cast<std::size_t>(out.bits_per_token));
  for (const auto& t : tokens) out.bits += vocab.code_string(vocab.code_of(t));
  return out;
}

std::vector<std::uint32_t> decode_codes(std::string_view bits, int bits_per_token) {
  const auto n = static_cast<std::size_t>(bits_per_token);
  if (n == 0 || bits.size() % n != 0) {
    throw Error(Errc::LengthMismatch, "bitstring length " + std::to_string(bits.size()) +
                                          " is not a multiple of " + std::to_string(n));
  }
  std::vector<std::uint32_t> codes;
  codes.reserve(bits.size() / n);
  for (std::size_t i = 0; i < bits.size(); i += n) {
    std::uint32_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const char ch = bits[i + j];
      if (ch != '0' && ch != '1') {
        throw Error(Errc::LengthMismatch, "bitstring contains non-binary character");
      }
      c = (c << 1) | static_cast<std::uint32_t>(ch - '0');
    }
    codes.push_back(c);
  }
  return codes;
}

std::vector<std::string> decode_bits(std::string_view bits, const TokenVocabulary& vocab) {
  std::vector<std::string> tokens;
  for (auto c : decode_codes(bits, vocab.bits_per_token())) tokens.push_back(vocab.token_of(c));
  return tokens;
}

std::vector<std::string> decode_bits(const MoleculeBitstring& bits, const TokenVocabulary& vocab) {
  if (bits.bits_per_token != vocab.bits_per_token()) {
    throw Error(Errc::LengthMismatch, "bitstring block width does not match vocabulary");
  }
  return decode_bits(bits.bits, vocab);
}

std::vector<std::string> split_selfies(std::string_view selfies) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < selfies.size()) {
    if (selfies[i] == ' ' || selfies[i] == '\n' || selfies[i] == '\t') {
      ++i;
      continue;
    }
    if (selfies[i] != '[') {
      throw Error(Errc::UnknownToken, "malformed SELFIES near position " + std::to_string(i));
    }
    const auto close = selfies.find(']', i);
    if (close == std::string_view::npos) {
      throw Error(Errc::UnknownToken, "unterminated SELFIES token");
    }
    tokens.emplace_back(selfies.substr(i, close - i + 1));
    i = close + 1;
  }
  return tokens;
}

std::string join_selfies(std::span<const std::string> tokens) {
  std::string s;
  for (const auto& t : tokens) s += t;
  return s;
}

}  // namespace qevo::codec

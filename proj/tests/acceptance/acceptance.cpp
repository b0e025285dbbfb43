// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any check fails.

#include <sys/resource.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "golden.hpp"
#include "qevo/canonical.hpp"
#include "qevo/chem_props.hpp"
#include "qevo/qed.hpp"
#include "qevo/crippen.hpp"
#include "qevo/ensemble.hpp"
#include "qevo/optimizers.hpp"
#include "qevo/qevo_driver.hpp"
#include "qevo/quantum_sampler.hpp"
#include "qevo/reference_space.hpp"
#include "qevo/rng.hpp"
#include "qevo/run_config.hpp"
#include "qevo/selfies_decoder.hpp"
#include "qevo/token_codec.hpp"

namespace fs = std::filesystem;
using namespace qevo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string bits_of(std::uint64_t x, int q) {
  std::string s(q, '0');
  for (int i = 0; i < q; ++i)
    if ((x >> (q - 1 - i)) & 1u) s[i] = '1';
  return s;
}

fs::path g_cache_dir = fs::temp_directory_path() / "qevo_acceptance";

const codec::TokenVocabulary& vocab3() {
  static const auto v = codec::TokenVocabulary::preset("table_2_3");
  return v;
}

ReferenceSpace reference(int k, const std::string& scorer) {
  Scorer s(ScorerSpec::parse(scorer));
  auto stem = fmt("table_2_3_k%d_", k) + (scorer == "plogp" ? std::string("plogp") : std::string("drug"));
  return enumerate_cached(vocab3(), k, s, g_cache_dir / (stem + ".ref"));
}

Outcome codec_fidelity() {
  using Table = std::vector<std::pair<std::string, std::string>>;
  const Table three = {{"[C]", "000"},  {"[O]", "001"},  {"[N]", "010"},     {"[F]", "011"},
                       {"[=C]", "100"}, {"[#N]", "101"}, {"[Ring1]", "110"}, {"[Branch1]", "111"}};
  const Table four = {{"[C]", "0000"},       {"[=C]", "1000"},       {"[#C]", "0100"},      {"[O]", "0010"},
                      {"[=O]", "0001"},      {"[N]", "1100"},        {"[=N]", "0011"},      {"[#N]", "0110"},
                      {"[F]", "1001"},       {"[Cl]", "1010"},       {"[Ring1]", "0101"},   {"[Ring2]", "1110"},
                      {"[Branch1]", "0111"}, {"[=Branch1]", "1101"}, {"[Branch2]", "1011"}, {"[=Branch2]", "1111"}};
  int table_errors = 0;
  for (const auto& [name, table] : {std::pair{"table_2_3", three}, std::pair{"table_2_4", four}}) {
    auto v = codec::TokenVocabulary::preset(name);
    if (v.size() != table.size()) ++table_errors;
    for (const auto& [tok, bits] : table) {
      std::vector<std::string> one{tok};
      if (codec::encode_tokens(one, v).bits != bits || codec::decode_bits(bits, v) != one) ++table_errors;
    }
  }
  auto start = Clock::now();
  std::size_t bad = 0;
  std::string bits(18, '0');
  for (std::uint32_t x = 0; x < (1u << 18); ++x) {
    for (int i = 0; i < 18; ++i) bits[i] = ((x >> (17 - i)) & 1u) ? '1' : '0';
    if (codec::encode_tokens(codec::decode_bits(bits, vocab3()), vocab3(), 6).bits != bits) ++bad;
  }
  double t = seconds_since(start);
  return {table_errors == 0 && bad == 0 && t < 1.0,
          fmt("table mismatches %d, round-trip failures %zu of 262144, %.3f s", table_errors, bad, t)};
}

Outcome plogp_values() {
  auto plogp = [](const char* s) { return chem::plogp_loss(selfies::decode_molecule(s)).value; };
  double hexane = plogp("[C][C][C][C][C][C]"), pentane = plogp("[C][C][C][C][C]");
  double nonane = plogp("[C][C][C][C][C][C][C][C][C]");
  bool ok = std::abs(hexane + 2.5866) < 1e-3 && std::abs(pentane + 2.1965) < 1e-3 && std::abs(nonane + 3.7569) < 1e-3;
  return {ok, fmt("hexane %.4f, pentane %.4f, nonane %.4f", hexane, pentane, nonane)};
}

Outcome reference_counts() {
  auto golden = qevo::testing::load_unique_counts();
  Scorer s(ScorerSpec::parse("plogp"));
  auto start = Clock::now();
  auto k6 = enumerate(vocab3(), 6, s);
  double t6 = seconds_since(start);
  auto k7 = enumerate(vocab3(), 7, s);
  bool ok = k6.unique_decodings() == golden.at(6) && k7.unique_decodings() == golden.at(7) && t6 < 60.0;
  return {ok, fmt("k=6 %zu (golden %llu, %.2f s), k=7 %zu (golden %llu)", k6.unique_decodings(),
                  (unsigned long long)golden.at(6), t6, k7.unique_decodings(), (unsigned long long)golden.at(7))};
}

Outcome uniform_init() {
  sim::AnsatzSpec spec{sim::Family::RA, 18};
  auto amps = sim::ra_statevector(spec, sim::uniform_init(spec));
  const double expect = 1.0 / std::sqrt(double(amps.size()));
  double worst = 0.0;
  for (double a : amps) worst = std::max(worst, std::abs(a - expect));
  sim::AnsatzSpec small{sim::Family::RA, 6};
  auto hist = sim::sample(small, sim::uniform_init(small), 100000, 11);
  double chi2 = 0.0, e = 100000.0 / 64.0;
  for (std::uint64_t x = 0; x < 64; ++x) {
    auto it = hist.counts.find(bits_of(x, 6));
    double n = it == hist.counts.end() ? 0.0 : double(it->second);
    chi2 += (n - e) * (n - e) / e;
  }
  double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(63), chi2));
  return {worst < 1e-12 && p > 0.001, fmt("max amplitude deviation %.2e at q=18, chi2 %.1f p=%.3f at q=6", worst, chi2, p)};
}

Outcome biased_init() {
  Philox rng(2024);
  int fails = 0;
  for (auto fam : {sim::Family::RA, sim::Family::BY}) {
    sim::AnsatzSpec spec{fam, 12};
    for (int t = 0; t < 20; ++t) {
      auto target = bits_of(rng.below(1u << 12), 12);
      auto h = sim::sample(spec, sim::biased_init(spec, target), 4096, 100 + t);
      if (h.unique_count() != 1 || h.counts.begin()->first != target) ++fails;
    }
  }
  return {fails == 0, fmt("%d of 40 targets (20 RA, 20 BY) produced a shot off target", fails)};
}

Outcome ensemble_math() {
  ScoreCache cache(vocab3(), Scorer(ScorerSpec::parse("plogp")));
  Philox rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    sim::SampleHistogram h;
    int keys = 1 + int(rng.below(40));
    for (int i = 0; i < keys; ++i) h.add(bits_of(rng.below(1u << 18), 18), 1 + rng.below(100));
    double sum = 0.0;
    for (const auto& [bits, n] : h.counts)
      sum += double(n) * chem::plogp_loss(selfies::decode_bitstring(bits, vocab3())).value;
    worst = std::max(worst, std::abs(ensemble_average(h, cache) - sum / double(h.shots)));
  }
  sim::SampleHistogram same, distinct;
  same.add(bits_of(0, 18), 1024);
  for (std::uint64_t x = 0; x < 1024; ++x) distinct.add(bits_of(x, 18));
  bool edges = purity(same) == 1.0 - 1.0 / 1024.0 && purity(distinct) == 0.0;
  return {worst < 1e-12 && edges, fmt("max deviation %.2e over 1000 histograms, purity edges %s", worst, edges ? "exact" : "off")};
}

Outcome optimizer_sanity() {
  constexpr int n = 10;
  std::vector<double> star(n);
  for (int i = 0; i < n; ++i) star[i] = 0.9 * std::sin(1.7 * i + 0.3);
  opt::Objective f = [&](std::span<const double> x, const opt::EvalTag&) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += (1.0 + 0.2 * i) * (x[i] - star[i]) * (x[i] - star[i]);
    return v;
  };
  auto dist = [&](const std::vector<double>& x) {
    double d = 0.0;
    for (int i = 0; i < n; ++i) d += (x[i] - star[i]) * (x[i] - star[i]);
    return std::sqrt(d);
  };
  opt::OptimizerConfig spsa;
  spsa.method = opt::Method::Spsa;
  spsa.max_iterations = 1500;
  spsa.seed = 5;
  spsa.spsa.a = 0.1;
  spsa.spsa.A = 50;
  spsa.spsa.c = 0.05;
  spsa.spsa.resamplings = 2;
  opt::OptimizerConfig imfil;
  imfil.max_iterations = 2000;
  imfil.imfil.initial_scale = 0.5;
  imfil.imfil.min_scale = 1e-4;
  double d_spsa = dist(opt::run_optimizer(std::vector<double>(n, 0.0), f, spsa).theta);
  double d_imfil = dist(opt::run_optimizer(std::vector<double>(n, 0.0), f, imfil).theta);

  std::vector<double> theta(n, 0.0);
  auto variance = [&](int r) {
    Philox rng(99, r);
    opt::EvalCounter counter;
    const int trials = 4000;
    std::vector<double> m(n, 0.0), sq(n, 0.0);
    for (int t = 0; t < trials; ++t) {
      auto g = opt::spsa_gradient(theta, f, 0.05, r, rng, counter, 0);
      for (int i = 0; i < n; ++i) {
        m[i] += g[i];
        sq[i] += g[i] * g[i];
      }
    }
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += sq[i] / trials - (m[i] / trials) * (m[i] / trials);
    return v;
  };
  double v1 = variance(1), ratio4 = v1 / variance(4), ratio10 = v1 / variance(10);
  bool var_ok = std::abs(ratio4 / 4 - 1) <= 0.2 && std::abs(ratio10 / 10 - 1) <= 0.2;
  return {d_spsa < 1e-2 && d_imfil < 1e-2 && var_ok,
          fmt("SPSA |d|=%.2e, imfil |d|=%.2e, variance ratio %.2f at 4 and %.2f at 10 resamplings", d_spsa, d_imfil,
              ratio4, ratio10)};
}

BatchSummary run_seeds(RunConfig cfg, const ReferenceSpace& ref, std::uint64_t first, std::uint64_t last) {
  std::vector<std::uint64_t> seeds;
  for (auto s = first; s <= last; ++s) seeds.push_back(s);
  cfg.reference_cache.clear();
  auto records = run_batch(cfg, seeds);
  for (const auto& r : records)
    if (!r.error.empty()) throw std::runtime_error("seed " + std::to_string(r.seed) + ": " + r.error);
  return summarize(records, &ref);
}

Outcome qevo_k6() {
  auto ref = reference(6, "plogp");
  auto start = Clock::now();
  auto s = run_seeds(preset("plogp_k6"), ref, 1, 30);
  double t = seconds_since(start);
  bool ok = s.success_rate >= 0.8 && s.median_explored <= 0.5 && t < 600.0;
  return {ok, fmt("%zu/%zu hits, median explored %.1f%% of sampled molecules (%.1f%% counting every evaluation), %.0f s",
                  s.hits, s.runs, 100 * s.median_explored, 100 * s.median_explored_evaluated, t)};
}

Outcome qevo_k9() {
  auto ref = reference(9, "plogp");
  auto cfg = preset("plogp_k9");
  cfg.init = InitMode::Random;
  auto start = Clock::now();
  auto s = run_seeds(cfg, ref, 1, 10);
  return {s.success_rate >= 0.7, fmt("%zu/%zu hits, median explored %.2f%%, reference %zu decodings, %.0f s", s.hits,
                                     s.runs, 100 * s.median_explored, ref.unique_decodings(), seconds_since(start))};
}

Outcome drug_loss_structure() {
  selfies::SymbolTable table(vocab3());
  selfies::Decoder dec;
  selfies::RawGraph raw;
  std::unordered_set<std::string> seen;
  const auto ref_a = chem::fingerprint(selfies::decode_molecule("[C][C][O]"));
  const auto ref_b = chem::fingerprint(selfies::decode_molecule(kRuxolitinibLike));
  const chem::LossWeights w{2.0, 1.0, 0.0};
  std::size_t checked = 0, invalid = 0, violations = 0;
  double lo = 1e9, hi = -1e9;
  std::vector<std::uint32_t> codes(6);
  std::string key;
  const std::uint64_t total = 1ull << 18;
  for (std::uint64_t idx = 0; idx < total;) {
    for (int i = 0; i < 6; ++i) codes[i] = (idx >> (3 * (5 - i))) & 7u;
    int read = dec.decode(codes, table, raw);
    std::uint64_t block = 1ull << (3 * (6 - read));
    idx += block - (idx & (block - 1));
    key.clear();
    raw.append_key(key);
    if (!seen.insert(key).second) continue;
    auto g = selfies::finalize(raw);
    ++checked;
    for (auto branch : {chem::LargeRingBranch::Literal, chem::LargeRingBranch::Penalize}) {
      auto base = chem::drug_design_loss(g, w, std::nullopt, branch);
      auto with_a = chem::drug_design_loss(g, w, ref_a, branch);
      auto with_b = chem::drug_design_loss(g, w, ref_b, branch);
      if (base.value != with_a.value || base.value != with_b.value) ++violations;
      auto full = chem::drug_design_loss(g, {2.0, 1.0, 1.0}, ref_a, branch);
      if (!g.valid()) {
        if (base.value != 1.0 || full.value != 1.0 || base.valid) ++violations;
        continue;
      }
      for (double v : {base.value, full.value}) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (!(v >= 0.0 && v <= 1.2)) ++violations;
      }
      bool literal = branch == chem::LargeRingBranch::Literal;
      double c = chem::has_large_ring(g) == literal ? 1.0 : 1.2;
      if (chem::drug_term_a(g, branch) != c - chem::qed(g)) ++violations;
    }
    if (!g.valid()) ++invalid;
  }

  // Rank overlap with the golden table, which used the large-ring penalty branch.
  auto golden = qevo::testing::load_logp_golden(6);
  std::sort(golden.begin(), golden.end(), [](const auto& a, const auto& b) {
    return a.drug_loss != b.drug_loss ? a.drug_loss < b.drug_loss : a.smiles < b.smiles;
  });
  std::set<std::string> golden_top;
  for (std::size_t i = 0; i < 50 && i < golden.size(); ++i)
    golden_top.insert(canonicalize(selfies::decode_bitstring(golden[i].bits, vocab3())).text);
  auto ours = enumerate(vocab3(), 6, Scorer(ScorerSpec::parse("drug{2,1,0}")));
  auto spec = ScorerSpec::parse("drug{2,1,0}");
  spec.branch = chem::LargeRingBranch::Penalize;
  auto ours_pen = enumerate(vocab3(), 6, Scorer(spec));
  auto overlap = [&](const ReferenceSpace& r) {
    int n = 0;
    for (const auto& e : r.top_k(50)) n += golden_top.count(e.canonical) ? 1 : 0;
    return n;
  };
  return {violations == 0 && checked > 0,
          fmt("%zu distinct decodings (%zu invalid), %zu violations, valid range [%.3f, %.3f]; "
              "top-50 overlap with golden %d/50 (penalize branch), %d/50 (literal branch)",
              checked, invalid, violations, lo, hi, overlap(ours_pen), overlap(ours))};
}

long peak_rss_kb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;
}

Outcome by_sampler() {
  sim::AnsatzSpec wide{sim::Family::BY, 160};
  auto theta = sim::random_init(wide, 1);
  long before = peak_rss_kb();
  sim::sample(wide, theta, 64, 1);
  long after_small = peak_rss_kb();
  auto big_run = sim::sample(wide, theta, 16384, 2);
  long grown = peak_rss_kb() - after_small;
  // Histogram keys are the only per-shot storage: 16384 keys of 160 chars plus map nodes.
  bool memory_ok = grown < 16 * 1024 && after_small - before < 1024 && big_run.shots == 16384;

  const int q = 6;
  Philox rng(8);
  sim::AnsatzSpec ra{sim::Family::RA, q}, by{sim::Family::BY, q};
  std::vector<double> t_ra(2 * q, 0.0), t_by(2 * q, 0.0);
  for (int i = 0; i < q; ++i) {
    double phi = 0.3 + 2.5 * rng.uniform();
    t_ra[q + i] = phi;
    t_by[2 * i + 1] = phi;
  }
  const double shots = 100000;
  auto hb = sim::sample(by, t_by, 100000, 21), hr = sim::sample(ra, t_ra, 100000, 22);
  double tv = 0.0;
  for (std::uint64_t x = 0; x < (1u << q); ++x) {
    auto k = bits_of(x, q);
    double pb = hb.counts.count(k) ? hb.counts[k] / shots : 0.0, pr = hr.counts.count(k) ? hr.counts[k] / shots : 0.0;
    tv += std::abs(pb - pr) / 2;
  }
  return {memory_ok && tv < 0.02,
          fmt("160-bit sampling: +%ld kB peak RSS for 64 shots, +%ld kB for 16384; TV vs RA %.4f at 1e5 shots",
              after_small - before, grown, tv)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome reproducibility() {
  std::vector<RunConfig> configs;
  auto a = preset("plogp_k6");
  a.seed = 3;
  configs.push_back(a);
  auto b = preset("plogp_k7");
  b.family = sim::Family::BY;
  b.optimizer.method = opt::Method::Spsa;
  b.optimizer.max_iterations = 40;
  b.shots = 512;
  configs.push_back(b);
  int identical = 0;
  std::size_t bytes = 0;
  for (auto& cfg : configs) {
    cfg.reference_cache.clear();
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      auto dir = g_cache_dir / fmt("rerun_%s_%d", cfg.name.c_str(), rep);
      fs::remove_all(dir);
      write_record(run_qevo(cfg), dir, cfg);
      auto rows = slurp(dir / "rows.jsonl");
      fs::remove_all(dir);
      if (rep == 0) {
        first = rows;
        bytes += rows.size();
      } else if (rows == first && !rows.empty()) {
        ++identical;
      }
    }
  }
  return {identical == int(configs.size()), fmt("%d/%zu configs rerun byte-identical (%zu bytes of rows)", identical,
                                                configs.size(), bytes)};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cache-dir") g_cache_dir = argv[i + 1];
  fs::create_directories(g_cache_dir);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"codec_fidelity", codec_fidelity},
      {"plogp_values", plogp_values},
      {"reference_space_counts", reference_counts},
      {"uniform_initialization", uniform_init},
      {"biased_initialization", biased_init},
      {"ensemble_math", ensemble_math},
      {"optimizer_sanity", optimizer_sanity},
      {"qevo_k6_plogp_uniform_30_seeds", qevo_k6},
      {"qevo_k9_plogp_random_10_seeds", qevo_k9},
      {"drug_loss_structure", drug_loss_structure},
      {"by_sampler", by_sampler},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    auto start = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%zu checks, %d failed\n", checks.size(), failures);
  return failures == 0 ? 0 : 1;
}

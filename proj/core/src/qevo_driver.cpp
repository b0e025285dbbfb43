#include "qevo/qevo_driver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "qevo/error.hpp"
#include "qevo/fingerprint.hpp"
#include "qevo/parallel.hpp"
#include "qevo/rng.hpp"
#include "qevo/selfies_decoder.hpp"

namespace qevo {

namespace {

using nlohmann::json;

constexpr std::uint64_t kInitialStream = 0x1a171a17ULL;

std::uint64_t eval_seed(std::uint64_t seed, std::uint64_t stream) { return mix64(seed ^ mix64(stream + 0x51ed)); }

int window_of(int iteration, int total) {
  if (iteration < 0 || total <= 0) return 0;
  return std::min(5, iteration * 6 / total);
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

bool molecule_less(const MoleculeLog& a, const MoleculeLog& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.canonical < b.canonical;
}

// Molecules from measured samples plus the set of canonical forms seen by
// any objective call.
class Ledger {
 public:
  void log_measurement(const sim::SampleHistogram& hist, ScoreCache& cache, int iteration) {
    for (const auto& [bits, n] : hist.counts) {
      const auto& mol = cache.lookup(bits);
      auto [it, fresh] = index_.try_emplace(mol.canonical, molecules_.size());
      if (fresh) molecules_.push_back({mol.canonical, mol.score, mol.valid, bits, iteration, 0});
      molecules_[it->second].count += n;
      if (mol.valid && (!best_ || molecule_less(molecules_[it->second], molecules_[*best_]))) best_ = it->second;
    }
  }

  void log_evaluation(const sim::SampleHistogram& hist, ScoreCache& cache) {
    std::vector<const std::string*> forms;
    forms.reserve(hist.counts.size());
    for (const auto& [bits, n] : hist.counts) {
      const auto& mol = cache.lookup(bits);
      if (mol.valid) forms.push_back(&mol.canonical);
    }
    std::lock_guard lock(mutex_);
    for (const auto* f : forms) evaluated_.insert(*f);
  }

  std::size_t unique_valid() const {
    return static_cast<std::size_t>(std::count_if(molecules_.begin(), molecules_.end(), [](const MoleculeLog& m) { return m.valid; }));
  }
  std::size_t unique_evaluated() {
    std::lock_guard lock(mutex_);
    return evaluated_.size();
  }
  const MoleculeLog* best() const { return best_ ? &molecules_[*best_] : nullptr; }
  std::vector<MoleculeLog> sorted() const {
    auto out = molecules_;
    std::sort(out.begin(), out.end(), molecule_less);
    return out;
  }

 private:
  std::vector<MoleculeLog> molecules_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<std::size_t> best_;
  std::mutex mutex_;
  std::unordered_set<std::string> evaluated_;
};

json row_json(const IterationRow& r) {
  return json{{"iteration", r.iteration},
              {"loss", r.loss},
              {"p_m", r.p_m},
              {"purity", r.purity},
              {"unique_bitstrings", r.unique_bitstrings},
              {"unique_molecules", r.unique_molecules},
              {"unique_evaluated", r.unique_evaluated},
              {"best_canonical", r.best_canonical},
              {"best_score", r.best_score},
              {"theta_hash", r.theta_hash},
              {"evaluations", r.evaluations},
              {"scale", r.scale},
              {"grad_norm", r.grad_norm},
              {"window", r.window}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::Io, "cannot write " + path.string());
  os << text;
  if (!os) throw Error(Errc::Io, "write failed for " + path.string());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t RunRecord::unique_valid() const {
  return static_cast<std::size_t>(std::count_if(molecules.begin(), molecules.end(), [](const MoleculeLog& m) { return m.valid; }));
}

const MoleculeLog* RunRecord::best() const {
  for (const auto& m : molecules) {
    if (m.valid) return &m;
  }
  return nullptr;
}

std::vector<std::pair<int, int>> RunRecord::windows() const {
  const int n = loop_iterations();
  std::vector<std::pair<int, int>> out;
  for (int w = 0; w < 6; ++w) out.emplace_back(n * w / 6, n * (w + 1) / 6);
  return out;
}

std::string theta_hash(const std::vector<double>& theta) {
  const auto h = chem::fnv1a64(theta.data(), theta.size() * sizeof(double));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunRecord run_qevo(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto vocab = codec::TokenVocabulary::resolve(cfg.vocabulary);
  const auto spec = cfg.ansatz(vocab.bits_per_token());
  ScoreCache cache(vocab, Scorer(cfg.scorer));

  RunRecord rec;
  rec.name = cfg.name;
  rec.seed = cfg.seed;
  rec.vocabulary = vocab.name();
  rec.tokens = cfg.tokens;
  rec.scorer_id = cache.scorer().id();
  rec.p0 = cfg.loss.p0;

  sim::ParameterVector theta;
  switch (cfg.init) {
    case InitMode::Uniform: theta = sim::uniform_init(spec); break;
    case InitMode::Random: theta = sim::random_init(spec, mix64(cfg.seed ^ 0x7a7a)); break;
    case InitMode::Biased: {
      const auto tokens = codec::split_selfies(cfg.target);
      theta = sim::biased_init(spec, codec::encode_tokens(tokens, vocab, static_cast<std::size_t>(cfg.tokens)).bits);
      break;
    }
  }

  Ledger ledger;
  // Stats of the latest measured sample; measurements run on the caller's
  // thread, one per iteration.
  EnsembleStats measured;

  const auto make_row = [&](int iteration, const EnsembleStats& st, const std::vector<double>& at) {
    IterationRow row;
    row.iteration = iteration;
    row.loss = st.loss;
    row.p_m = st.p_m;
    row.purity = st.purity;
    row.unique_bitstrings = st.unique_count;
    row.unique_molecules = ledger.unique_valid();
    row.unique_evaluated = ledger.unique_evaluated();
    if (const auto* b = ledger.best()) {
      row.best_canonical = b->canonical;
      row.best_score = b->score;
    }
    row.theta_hash = theta_hash(at);
    return row;
  };

  const auto finish = [&](const opt::RunResult* result) {
    rec.final_theta = result ? result->theta : theta;
    rec.converged = result && result->converged;
    rec.molecules = ledger.sorted();
    rec.unique_evaluated = ledger.unique_evaluated();
    for (auto& row : rec.rows) row.window = window_of(row.iteration, rec.loop_iterations());
    rec.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  // Initial sample, reused as the measurement of loop iteration 0.
  const auto initial_hist = sim::sample(spec, theta, cfg.shots, eval_seed(cfg.seed, kInitialStream));
  const auto initial = total_loss(initial_hist, cfg.loss, cache);
  ledger.log_measurement(initial_hist, cache, -1);
  ledger.log_evaluation(initial_hist, cache);
  rec.rows.push_back(make_row(-1, initial, theta));
  if (progress) progress(rec.rows.back());

  const opt::Objective objective = [&](std::span<const double> at, const opt::EvalTag& tag) {
    if (tag.measurement && tag.iteration == 0) {
      measured = initial;
      return initial.loss;
    }
    const auto hist = sim::sample(spec, at, cfg.shots, eval_seed(cfg.seed, tag.id));
    auto st = total_loss(hist, cfg.loss, cache);
    ledger.log_evaluation(hist, cache);
    if (tag.measurement) {
      ledger.log_measurement(hist, cache, tag.iteration);
      measured = std::move(st);
      return measured.loss;
    }
    return st.loss;
  };

  auto opt_cfg = cfg.optimizer;
  opt_cfg.seed = mix64(cfg.seed ^ cfg.optimizer.seed ^ 0x0b7);
  try {
    const auto result = opt::run_optimizer(theta, objective, opt_cfg, [&](const opt::OptStep& step) {
      auto row = make_row(step.iteration, measured, step.theta);
      row.evaluations = step.evaluations;
      row.scale = step.scale;
      row.grad_norm = step.grad_norm;
      rec.rows.push_back(std::move(row));
      if (progress) progress(rec.rows.back());
    });
    finish(&result);
  } catch (const Error& err) {
    finish(nullptr);
    rec.error = std::string(to_string(err.code())) + ": " + err.what();
  }
  return rec;
}

bool success_against_reference(const RunRecord& record, const ReferenceSpace& ref, std::size_t top_k) {
  if (record.vocabulary != ref.vocabulary() || record.tokens != ref.tokens() || record.scorer_id != ref.scorer_id()) {
    throw Error(Errc::ScopeMismatch, "record (" + record.vocabulary + ", k=" + std::to_string(record.tokens) + ", " +
                                         record.scorer_id + ") does not match reference (" + ref.vocabulary() +
                                         ", k=" + std::to_string(ref.tokens()) + ", " + ref.scorer_id() + ")");
  }
  for (const auto& m : record.molecules) {
    if (!m.valid) continue;
    const long r = ref.rank_of(m.canonical);
    if (r >= 0 && static_cast<std::size_t>(r) < top_k) return true;
  }
  return false;
}

std::filesystem::path run_directory(const RunConfig& cfg) {
  return cfg.output_dir / (cfg.name + "_seed" + std::to_string(cfg.seed));
}

std::optional<ReferenceSpace> reference_for(const RunConfig& cfg) {
  if (cfg.reference_cache.empty()) return std::nullopt;
  const auto vocab = codec::TokenVocabulary::resolve(cfg.vocabulary);
  if (cfg.tokens * vocab.bits_per_token() > kMaxEnumerationBits) return std::nullopt;
  return enumerate_cached(vocab, cfg.tokens, Scorer(cfg.scorer), cfg.reference_cache);
}

void write_record(const RunRecord& record, const std::filesystem::path& dir, const RunConfig& cfg,
                  const ReferenceSpace* ref) {
  std::filesystem::create_directories(dir);
  std::string rows;
  for (const auto& r : record.rows) rows += row_json(r).dump() + "\n";
  write_text(dir / "rows.jsonl", rows);

  std::string csv = "canonical,score,valid,bits,first_iteration,window,count\n";
  const int total = record.loop_iterations();
  for (const auto& m : record.molecules) {
    csv += m.canonical + "," + format_score(m.score) + "," + (m.valid ? "1" : "0") + "," + m.bits + "," +
           std::to_string(m.first_iteration) + "," + std::to_string(window_of(m.first_iteration, total)) + "," +
           std::to_string(m.count) + "\n";
  }
  write_text(dir / "molecules.csv", csv);

  json summary{{"name", record.name},
               {"seed", record.seed},
               {"vocabulary", record.vocabulary},
               {"tokens", record.tokens},
               {"scorer", record.scorer_id},
               {"p0", record.p0},
               {"iterations", record.loop_iterations()},
               {"converged", record.converged},
               {"unique_valid_sampled", record.unique_valid()},
               {"unique_valid_evaluated", record.unique_evaluated},
               {"final_theta", record.final_theta},
               {"elapsed_seconds", record.elapsed_seconds},
               {"config", cfg.to_toml()}};
  json windows = json::array();
  for (const auto& [b, e] : record.windows()) windows.push_back({b, e});
  summary["windows"] = windows;
  if (const auto* b = record.best()) summary["best"] = {{"canonical", b->canonical}, {"score", b->score}, {"bits", b->bits}};
  json top = json::array();
  for (const auto& m : record.molecules) {
    if (top.size() >= 20) break;
    if (m.valid) top.push_back({{"canonical", m.canonical}, {"score", m.score}, {"first_iteration", m.first_iteration}});
  }
  summary["best_molecules"] = top;
  if (!record.error.empty()) summary["error"] = record.error;
  if (ref) {
    summary["reference_unique_valid"] = ref->unique_valid();
    summary["reference_unique_decodings"] = ref->unique_decodings();
    summary["explored_fraction"] = static_cast<double>(record.unique_valid()) / static_cast<double>(ref->unique_valid());
    summary["explored_fraction_evaluated"] =
        static_cast<double>(record.unique_evaluated) / static_cast<double>(ref->unique_valid());
    summary["top10_hit"] = success_against_reference(record, *ref, 10);
    summary["p0_reference"] = ref->ranking().empty() ? 0.0 : ref->ranking().front().score;
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

RunRecord read_record(const std::filesystem::path& dir) {
  RunRecord rec;
  {
    std::ifstream in(dir / "summary.json");
    if (!in) throw Error(Errc::Io, "cannot read " + (dir / "summary.json").string());
    json s;
    try {
      in >> s;
    } catch (const json::exception& e) {
      throw Error(Errc::Io, "bad summary.json: " + std::string(e.what()));
    }
    rec.name = s.value("name", "");
    rec.seed = s.value("seed", std::uint64_t{0});
    rec.vocabulary = s.value("vocabulary", "");
    rec.tokens = s.value("tokens", 0);
    rec.scorer_id = s.value("scorer", "");
    rec.p0 = s.value("p0", 0.0);
    rec.converged = s.value("converged", false);
    rec.unique_evaluated = s.value("unique_valid_evaluated", std::size_t{0});
    rec.final_theta = s.value("final_theta", std::vector<double>{});
  }
  std::ifstream in(dir / "molecules.csv");
  if (!in) throw Error(Errc::Io, "cannot read " + (dir / "molecules.csv").string());
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() < 7) throw Error(Errc::Io, "bad molecules.csv row: " + line);
    MoleculeLog m;
    m.canonical = f[0];
    m.score = std::stod(f[1]);
    m.valid = f[2] == "1";
    m.bits = f[3];
    m.first_iteration = std::stoi(f[4]);
    m.count = std::stoull(f[6]);
    rec.molecules.push_back(std::move(m));
  }
  std::sort(rec.molecules.begin(), rec.molecules.end(), molecule_less);
  return rec;
}

void export_candidates(const RunRecord& record, std::size_t top_n, const std::filesystem::path& path) {
  if (record.molecules.empty()) throw Error(Errc::InvalidConfig, "record has no molecules");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::string csv = "rank,canonical,score,bits,first_iteration\n";
  std::size_t rank = 0;
  for (const auto& m : record.molecules) {
    if (!m.valid) continue;
    if (rank == top_n) break;
    csv += std::to_string(++rank) + "," + m.canonical + "," + format_score(m.score) + "," + m.bits + "," +
           std::to_string(m.first_iteration) + "\n";
  }
  write_text(path, csv);
}

std::vector<RunRecord> run_batch(const RunConfig& base, const std::vector<std::uint64_t>& seeds) {
  base.validate();
  std::vector<RunRecord> out(seeds.size());
  parallel_each(seeds.size(), [&](std::size_t i) {
    auto cfg = base;
    cfg.seed = seeds[i];
    out[i] = run_qevo(cfg);
  });
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

BatchSummary summarize(const std::vector<RunRecord>& records, const ReferenceSpace* ref, std::size_t top_k) {
  BatchSummary s;
  s.runs = records.size();
  if (!ref || records.empty()) return s;
  std::vector<double> explored, evaluated;
  for (const auto& r : records) {
    if (success_against_reference(r, *ref, top_k)) ++s.hits;
    const auto total = static_cast<double>(ref->unique_valid());
    explored.push_back(static_cast<double>(r.unique_valid()) / total);
    evaluated.push_back(static_cast<double>(r.unique_evaluated) / total);
  }
  s.success_rate = static_cast<double>(s.hits) / static_cast<double>(s.runs);
  s.median_explored = median(explored);
  s.mean_explored = mean(explored);
  double var = 0.0;
  for (const double x : explored) var += (x - s.mean_explored) * (x - s.mean_explored);
  s.std_explored = explored.size() > 1 ? std::sqrt(var / static_cast<double>(explored.size() - 1)) : 0.0;
  s.median_explored_evaluated = median(evaluated);
  s.mean_explored_evaluated = mean(evaluated);
  return s;
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  const auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(Errc::InvalidConfig, "bad seed list '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo = number(text.substr(0, dots));
    const auto hi = number(text.substr(dots + 2));
    if (hi < lo) throw Error(Errc::InvalidConfig, "empty seed range '" + std::string(text) + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  while (true) {
    const auto comma = text.find(',');
    seeds.push_back(number(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return seeds;
}

}  // namespace qevo

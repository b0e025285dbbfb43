// qevo: command-line front end for runs, reference spaces and analysis.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <cli11/CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qevo/analysis.hpp"
#include "qevo/error.hpp"
#include "qevo/qevo_driver.hpp"
#include "qevo/reference_space.hpp"
#include "qevo/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigArgs {
  std::string preset;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  std::optional<std::uint64_t> shots;
  std::optional<int> max_iterations;
  std::string init;
  std::string ansatz;
  std::string reference_cache;

  void add_to(CLI::App& cmd, bool with_seeds) {
    auto* source = cmd.add_option_group("source");
    source->add_option("--preset", preset, "Built-in preset name");
    source->add_option("--config", config, "TOML run config");
    source->require_option(1);
    if (with_seeds) {
      cmd.add_option("--seed", seed, "Master seed");
      cmd.add_option("--seeds", seeds, "Seed range or list, e.g. 1..30");
    }
    cmd.add_option("--out", out, "Output directory (overrides output.dir)");
    cmd.add_option("--shots", shots, "Shots per evaluation");
    cmd.add_option("--max-iterations", max_iterations, "Optimizer iteration budget");
    cmd.add_option("--init", init, "uniform | random | biased");
    cmd.add_option("--ansatz", ansatz, "ra | by");
    cmd.add_option("--reference-cache", reference_cache, "Reference space cache file");
  }

  qevo::RunConfig resolve() const {
    auto cfg = preset.empty() ? qevo::load_config(config) : qevo::preset(preset);
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.output_dir = out;
    if (shots) cfg.shots = *shots;
    if (max_iterations) cfg.optimizer.max_iterations = *max_iterations;
    if (!init.empty()) cfg.init = qevo::parse_init_mode(init);
    if (!ansatz.empty()) cfg.family = qevo::sim::parse_family(ansatz);
    if (!reference_cache.empty()) cfg.reference_cache = reference_cache;
    cfg.validate();
    return cfg;
  }
};

json run_json(const qevo::RunRecord& r, const qevo::ReferenceSpace* ref) {
  json j{{"seed", r.seed},
         {"iterations", r.loop_iterations()},
         {"converged", r.converged},
         {"unique_valid_sampled", r.unique_valid()},
         {"unique_valid_evaluated", r.unique_evaluated},
         {"elapsed_seconds", r.elapsed_seconds}};
  if (const auto* b = r.best()) j["best"] = {{"canonical", b->canonical}, {"score", b->score}};
  if (ref) {
    const auto total = static_cast<double>(ref->unique_valid());
    j["top10_hit"] = qevo::success_against_reference(r, *ref, 10);
    j["explored_fraction"] = static_cast<double>(r.unique_valid()) / total;
    j["explored_fraction_evaluated"] = static_cast<double>(r.unique_evaluated) / total;
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

int cmd_run(const ConfigArgs& args, bool force_batch) {
  auto cfg = args.resolve();
  const auto ref = qevo::reference_for(cfg);
  const auto* refp = ref ? &*ref : nullptr;
  if (args.seeds.empty() && !force_batch) {
    const auto rec = qevo::run_qevo(cfg);
    const auto dir = qevo::run_directory(cfg);
    qevo::write_record(rec, dir, cfg, refp);
    auto j = run_json(rec, refp);
    j["dir"] = dir.string();
    std::cout << j.dump(2) << '\n';
    return rec.error.empty() ? 0 : 1;
  }
  const auto seeds = qevo::parse_seeds(args.seeds.empty() ? std::to_string(cfg.seed) : args.seeds);
  const auto records = qevo::run_batch(cfg, seeds);
  json runs = json::array();
  bool failed = false;
  for (const auto& rec : records) {
    auto c = cfg;
    c.seed = rec.seed;
    qevo::write_record(rec, qevo::run_directory(c), c, refp);
    runs.push_back(run_json(rec, refp));
    failed = failed || !rec.error.empty();
  }
  const auto s = qevo::summarize(records, refp);
  json summary{{"name", cfg.name}, {"runs", s.runs}, {"per_run", runs}};
  if (refp) {
    summary["top10_hits"] = s.hits;
    summary["success_rate"] = s.success_rate;
    summary["median_explored_fraction"] = s.median_explored;
    summary["mean_explored_fraction"] = s.mean_explored;
    summary["std_explored_fraction"] = s.std_explored;
    summary["median_explored_fraction_evaluated"] = s.median_explored_evaluated;
    summary["mean_explored_fraction_evaluated"] = s.mean_explored_evaluated;
    summary["reference_unique_valid"] = refp->unique_valid();
  }
  fs::create_directories(cfg.output_dir);
  const auto path = cfg.output_dir / (cfg.name + "_batch.json");
  std::ofstream(path) << summary.dump(2) << '\n';
  summary.erase("per_run");
  summary["file"] = path.string();
  std::cout << summary.dump(2) << '\n';
  return failed ? 1 : 0;
}

int cmd_refspace(const std::string& vocab_name, int k, const std::string& scorer_name, const std::string& branch,
                 std::size_t top, const std::string& out, const std::string& cache) {
  const auto vocab = qevo::codec::TokenVocabulary::resolve(vocab_name);
  auto spec = qevo::ScorerSpec::parse(scorer_name);
  if (branch == "penalize") spec.branch = qevo::chem::LargeRingBranch::Penalize;
  const qevo::Scorer scorer(spec);
  const fs::path cache_path =
      cache.empty() ? fs::path(out) / (vocab.name() + "_k" + std::to_string(k) + "_" + (spec.kind == qevo::ScorerSpec::Kind::PLogP ? "plogp" : "drug") + ".ref")
                    : fs::path(cache);
  const auto t0 = std::chrono::steady_clock::now();
  const auto ref = qevo::enumerate_cached(vocab, k, scorer, cache_path);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto csv = fs::path(out) / (cache_path.stem().string() + "_top.csv");
  ref.write_csv(csv, top);
  json j{{"vocabulary", vocab.name()},
         {"k", k},
         {"scorer", scorer.id()},
         {"total", ref.total_multiplicity()},
         {"unique_decodings", ref.unique_decodings()},
         {"unique_valid", ref.unique_valid()},
         {"cache", cache_path.string()},
         {"csv", csv.string()},
         {"seconds", secs}};
  if (!ref.ranking().empty()) j["best"] = {{"canonical", ref.ranking().front().canonical}, {"score", ref.ranking().front().score}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_pca(const ConfigArgs& args, const std::vector<std::string>& run_dirs, const std::string& out) {
  const auto cfg = args.resolve();
  const auto ref = qevo::reference_for(cfg);
  if (!ref) throw qevo::Error(qevo::Errc::InvalidConfig, "pca needs a config with a reference cache");
  std::vector<qevo::RunRecord> records;
  for (const auto& d : run_dirs) records.push_back(qevo::read_record(d));
  qevo::analysis::PcaModel model;
  const auto rows =
      qevo::analysis::pca_project(*ref, qevo::codec::TokenVocabulary::resolve(cfg.vocabulary), records, &model);
  qevo::analysis::write_projection(rows, out);
  std::cout << json{{"rows", rows.size()}, {"variances", model.variances}, {"iterations", model.iterations}, {"file", out}}.dump(2)
            << '\n';
  return 0;
}

int cmd_validate(const ConfigArgs& args, bool print) {
  const auto cfg = args.resolve();
  if (print) {
    std::cout << cfg.to_toml();
  } else {
    std::cout << json{{"valid", true}, {"name", cfg.name}}.dump() << '\n';
  }
  return 0;
}

int report(const qevo::Error& e) {
  std::cerr << json{{"error", std::string(qevo::to_string(e.code()))}, {"message", e.what()}}.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QEVO: quantum ensemble variational optimization for molecular design"};
  app.require_subcommand(1);

  ConfigArgs run_args, batch_args, pca_args, validate_args;
  auto* run = app.add_subcommand("run", "Run QEVO for one seed or a seed range");
  run_args.add_to(*run, true);
  auto* batch = app.add_subcommand("batch", "Run a seed range and report success statistics");
  batch_args.add_to(*batch, true);

  auto* refspace = app.add_subcommand("refspace", "Enumerate a reference chemical space");
  std::string vocab = "table_2_3", scorer = "plogp", branch = "literal", ref_out = "refspace", cache;
  int k = 6;
  std::size_t top = 100;
  refspace->add_option("--vocab", vocab, "Vocabulary preset or file")->capture_default_str();
  refspace->add_option("--k", k, "Tokens per molecule")->capture_default_str();
  refspace->add_option("--scorer", scorer, "plogp or drug{alpha,beta,gamma,ref}")->capture_default_str();
  refspace->add_option("--large-ring-branch", branch, "literal | penalize")->capture_default_str();
  refspace->add_option("--top", top, "Rows in the ranking CSV")->capture_default_str();
  refspace->add_option("--out", ref_out, "Output directory")->capture_default_str();
  refspace->add_option("--cache", cache, "Binary cache path");

  auto* pca = app.add_subcommand("pca", "Project sampled molecules on reference principal components");
  pca_args.add_to(*pca, false);
  std::vector<std::string> run_dirs;
  std::string pca_out = "pca.csv";
  pca->add_option("--runs", run_dirs, "Run directories");
  pca->add_option("--projection", pca_out, "Output CSV")->capture_default_str();

  auto* exp = app.add_subcommand("export", "Export the best molecules of a run");
  std::string export_run, export_out = "candidates.csv";
  std::size_t export_top = 10000;
  exp->add_option("--run", export_run, "Run directory")->required();
  exp->add_option("--top", export_top, "Number of candidates")->capture_default_str();
  exp->add_option("--out", export_out, "Output CSV")->capture_default_str();

  auto* validate = app.add_subcommand("validate-config", "Check a config or preset");
  validate_args.add_to(*validate, true);
  bool print = false;
  validate->add_flag("--print", print, "Print the resolved config as TOML");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(run_args, false);
    if (*batch) return cmd_run(batch_args, true);
    if (*refspace) return cmd_refspace(vocab, k, scorer, branch, top, ref_out, cache);
    if (*pca) return cmd_pca(pca_args, run_dirs, pca_out);
    if (*exp) {
      qevo::export_candidates(qevo::read_record(export_run), export_top, export_out);
      std::cout << json{{"file", export_out}}.dump() << '\n';
      return 0;
    }
    if (*validate) return cmd_validate(validate_args, print);
  } catch (const qevo::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qevo/reference_space.hpp"
#include "qevo/run_config.hpp"

namespace qevo {

/// One row of the per-iteration trace. Iteration -1 is the initial sample.
struct IterationRow {
  int iteration = -1;
  double loss = 0.0;
  double p_m = 0.0;
  double purity = 0.0;
  std::size_t unique_bitstrings = 0;
  std::size_t unique_molecules = 0;   // cumulative, measured samples
  std::size_t unique_evaluated = 0;   // cumulative, every objective call
  std::string best_canonical;
  double best_score = 0.0;
  std::string theta_hash;
  std::uint64_t evaluations = 0;
  double scale = 0.0;
  double grad_norm = 0.0;
  int window = 0;
};

/// A molecule seen in a measured sample.
struct MoleculeLog {
  std::string canonical;  // empty for the invalid class
  double score = 0.0;
  bool valid = false;
  std::string bits;  // first bitstring seen
  int first_iteration = -1;
  std::uint64_t count = 0;  // shots over all measured samples
};

struct RunRecord {
  std::string name;
  std::uint64_t seed = 0;
  std::string vocabulary;
  int tokens = 0;
  std::string scorer_id;
  double p0 = 0.0;
  std::vector<IterationRow> rows;  // initial sample first
  std::vector<double> final_theta;
  std::vector<MoleculeLog> molecules;  // ascending score, ties by canonical
  std::size_t unique_evaluated = 0;
  bool converged = false;
  double elapsed_seconds = 0.0;
  std::string error;  // set when the run aborted

  int loop_iterations() const noexcept { return rows.empty() ? 0 : static_cast<int>(rows.size()) - 1; }
  /// Valid distinct molecules in measured samples.
  std::size_t unique_valid() const;
  const MoleculeLog* best() const;
  /// Six equal iteration windows [begin, end) for plotting.
  std::vector<std::pair<int, int>> windows() const;
};

using ProgressFn = std::function<void(const IterationRow&)>;

/// Runs QEVO. Config errors are thrown before any sampling; errors during
/// the loop stop the run and are reported in `RunRecord::error` alongside
/// everything logged so far.
RunRecord run_qevo(const RunConfig& cfg, const ProgressFn& progress = {});

/// True when any logged molecule is among the reference top_k. Throws
/// ScopeMismatch if the record and reference differ in space or scorer.
bool success_against_reference(const RunRecord& record, const ReferenceSpace& ref, std::size_t top_k = 10);

/// Writes rows.jsonl, summary.json and molecules.csv into `dir`.
void write_record(const RunRecord& record, const std::filesystem::path& dir, const RunConfig& cfg,
                  const ReferenceSpace* ref = nullptr);
/// Reads summary.json and molecules.csv back (rows are not needed for
/// analysis and are skipped).
RunRecord read_record(const std::filesystem::path& dir);

/// Run directory for a config: <output_dir>/<name>_seed<seed>.
std::filesystem::path run_directory(const RunConfig& cfg);

/// Reference space of a config, loaded from or written to its cache.
/// Empty when the config has no cache path or the space is too large.
std::optional<ReferenceSpace> reference_for(const RunConfig& cfg);

/// Candidate table: the top_n valid molecules of a record by score.
void export_candidates(const RunRecord& record, std::size_t top_n, const std::filesystem::path& path);

std::string theta_hash(const std::vector<double>& theta);

/// Independent runs of `base` with each seed, in parallel across seeds.
std::vector<RunRecord> run_batch(const RunConfig& base, const std::vector<std::uint64_t>& seeds);

struct BatchSummary {
  std::size_t runs = 0;
  std::size_t hits = 0;  // runs with a reference top-10 molecule
  double success_rate = 0.0;
  // Fractions of the reference space's valid molecules
  double median_explored = 0.0;
  double mean_explored = 0.0;
  double std_explored = 0.0;
  double median_explored_evaluated = 0.0;
  double mean_explored_evaluated = 0.0;
};

/// Requires a reference for the hit and exploration statistics; without one
/// only `runs` is filled.
BatchSummary summarize(const std::vector<RunRecord>& records, const ReferenceSpace* ref, std::size_t top_k = 10);

/// Parses "1..30", "4", or "1,3,7".
std::vector<std::uint64_t> parse_seeds(std::string_view text);

}  // namespace qevo

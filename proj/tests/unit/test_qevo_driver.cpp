#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qevo/analysis.hpp"
#include "qevo/error.hpp"
#include "qevo/qevo_driver.hpp"
#include "qevo/run_config.hpp"
#include "qevo/selfies_decoder.hpp"

namespace qevo {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("qevo_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig short_run() {
  auto cfg = preset("plogp_k6");
  cfg.optimizer.max_iterations = 12;
  cfg.reference_cache.clear();
  return cfg;
}

TEST(RunConfigTest, PresetsValidate) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset(name).validate()) << name;
  EXPECT_THROW(preset("nope"), Error);
}

TEST(RunConfigTest, TomlOverridesPreset) {
  auto cfg = parse_config(R"(
preset = "plogp_k7"
[sampling]
shots = 512
seed = 9
[optimizer]
method = "spsa"
[optimizer.spsa]
resamplings = 3
)");
  EXPECT_EQ(cfg.tokens, 7);
  EXPECT_EQ(cfg.shots, 512u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.optimizer.method, opt::Method::Spsa);
  EXPECT_EQ(cfg.optimizer.spsa.resamplings, 3);
}

TEST(RunConfigTest, TomlRoundTrips) {
  auto cfg = preset("jak2_40tok_biased");
  auto back = parse_config(cfg.to_toml());
  EXPECT_EQ(back.to_toml(), cfg.to_toml());
  EXPECT_EQ(back.scorer.id(), cfg.scorer.id());
}

TEST(RunConfigTest, RejectsUnknownKeysAndBadValues) {
  auto expect_invalid = [](const char* text) {
    try {
      parse_config(text).validate();
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidConfig) << text;
    }
  };
  expect_invalid("[sampling]\nshotz = 5\n");
  expect_invalid("[sampling]\nshots = 0\n");
  expect_invalid("[loss]\nlambda = -1.0\n");
  expect_invalid("[ansatz]\ninit = \"biased\"\n");
}

TEST(Driver, RerunsAreByteIdentical) {
  auto cfg = short_run();
  auto a = scratch("rerun_a"), b = scratch("rerun_b");
  auto ra = run_qevo(cfg), rb = run_qevo(cfg);
  ASSERT_TRUE(ra.error.empty()) << ra.error;
  write_record(ra, a, cfg);
  write_record(rb, b, cfg);
  auto rows = slurp(a / "rows.jsonl");
  EXPECT_FALSE(rows.empty());
  EXPECT_EQ(rows, slurp(b / "rows.jsonl"));
  EXPECT_EQ(slurp(a / "molecules.csv"), slurp(b / "molecules.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Driver, SeedsChangeTheRun) {
  auto cfg = short_run();
  auto a = run_qevo(cfg);
  cfg.seed = 2;
  auto b = run_qevo(cfg);
  EXPECT_NE(a.rows.front().theta_hash, "");
  EXPECT_NE(a.rows.back().loss, b.rows.back().loss);
}

TEST(Driver, RecordIsConsistent) {
  auto cfg = short_run();
  auto rec = run_qevo(cfg);
  ASSERT_EQ(rec.rows.size(), 13u);
  EXPECT_EQ(rec.rows.front().iteration, -1);
  EXPECT_EQ(rec.rows.front().unique_bitstrings, rec.rows.front().unique_bitstrings);
  for (std::size_t i = 1; i < rec.rows.size(); ++i) {
    EXPECT_GE(rec.rows[i].unique_molecules, rec.rows[i - 1].unique_molecules);
    EXPECT_GE(rec.rows[i].unique_evaluated, rec.rows[i].unique_molecules);
  }
  EXPECT_EQ(rec.unique_valid() + 1 >= rec.molecules.size(), true);
  ASSERT_NE(rec.best(), nullptr);
  EXPECT_EQ(rec.best()->score, rec.molecules.front().score);
  auto w = rec.windows();
  EXPECT_EQ(w.size(), 6u);
  EXPECT_EQ(w.back().second, rec.loop_iterations());
}

TEST(Driver, RecordRoundTripsThroughDisk) {
  auto cfg = short_run();
  auto rec = run_qevo(cfg);
  auto dir = scratch("roundtrip");
  write_record(rec, dir, cfg);
  auto back = read_record(dir);
  EXPECT_EQ(back.seed, rec.seed);
  EXPECT_EQ(back.scorer_id, rec.scorer_id);
  ASSERT_EQ(back.molecules.size(), rec.molecules.size());
  EXPECT_EQ(back.molecules.front().canonical, rec.molecules.front().canonical);
  fs::remove_all(dir);
}

TEST(Driver, ScopeMismatchIsReported) {
  auto cfg = short_run();
  auto rec = run_qevo(cfg);
  auto ref = enumerate(codec::TokenVocabulary::preset("table_2_3"), 6, Scorer(ScorerSpec::parse("drug")));
  try {
    success_against_reference(rec, ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ScopeMismatch);
  }
}

TEST(Driver, ParsesSeedLists) {
  EXPECT_EQ(parse_seeds("1..4"), (std::vector<std::uint64_t>{1, 2, 3, 4}));
  EXPECT_EQ(parse_seeds("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(parse_seeds("1,3,7"), (std::vector<std::uint64_t>{1, 3, 7}));
  EXPECT_THROW(parse_seeds("4..1"), Error);
}

TEST(Analysis, PcaProjectsReferenceSpace) {
  auto vocab = codec::TokenVocabulary::preset("table_2_3");
  auto ref = enumerate(vocab, 6, Scorer(ScorerSpec::parse("plogp")));
  analysis::PcaModel model;
  auto rows = analysis::pca_project(ref, vocab, {}, &model);
  EXPECT_EQ(rows.size(), ref.unique_valid());
  ASSERT_GE(model.variances.size(), 2u);
  EXPECT_GE(model.variances[0], model.variances[1]);
  EXPECT_GT(model.variances[1], 0.0);
}

TEST(Analysis, DegenerateInputIsRejected) {
  std::vector<chem::Fingerprint> same(5, chem::fingerprint(selfies::decode_molecule("[C][C][O]")));
  try {
    analysis::fit_pca(same);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateCovariance);
  }
}

}  // namespace
}  // namespace qevo

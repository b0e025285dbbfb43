#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qevo/ensemble.hpp"
#include "qevo/optimizers.hpp"
#include "qevo/quantum_sampler.hpp"
#include "qevo/scorer.hpp"

namespace qevo {

enum class InitMode { Uniform, Random, Biased };

InitMode parse_init_mode(std::string_view s);
std::string_view to_string(InitMode m) noexcept;

struct RunConfig {
  std::string name = "custom";
  std::string vocabulary = "table_2_3";  // preset name or vocabulary file
  int tokens = 6;
  sim::Family family = sim::Family::RA;
  sim::RaMethod ra_method = sim::RaMethod::Auto;
  int statevector_cap = sim::kDefaultStatevectorCap;
  InitMode init = InitMode::Uniform;
  std::string target;  // SELFIES, required for biased init
  std::uint64_t shots = 1024;
  std::uint64_t seed = 1;
  ScorerSpec scorer;
  LossConfig loss;
  opt::OptimizerConfig optimizer;
  std::filesystem::path output_dir = "runs";
  std::filesystem::path reference_cache;  // empty: no reference space

  /// Throws InvalidConfig (or the codec/decoder error) on the first problem.
  void validate() const;
  std::string to_toml() const;
  sim::AnsatzSpec ansatz(int bits_per_token) const;
};

/// Presets plogp_k6..k9, drug_k6..k9, jak2_40tok_unbiased, jak2_40tok_biased.
const std::vector<std::string>& preset_names();
/// Throws UnknownPreset.
RunConfig preset(std::string_view name);

/// TOML config. A top-level `preset = "..."` key selects the base config
/// that the remaining keys override. Unknown keys are rejected.
RunConfig parse_config(std::string_view toml_text);
RunConfig load_config(const std::filesystem::path& path);

/// The 40-token reference used by the JAK2 presets.
extern const char* const kRuxolitinibLike;

}  // namespace qevo

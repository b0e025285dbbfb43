#include "qevo/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <tomlplusplus/toml.hpp>

#include "qevo/error.hpp"
#include "qevo/selfies_decoder.hpp"
#include "qevo/token_codec.hpp"

namespace qevo {

// Ruxolitinib from its SELFIES, with [NH1] -> [N] and [=Ring1] -> [Ring1]
// so every token is in table_2_4, padded to 40 tokens with trailing
// branches that decode to nothing.
const char* const kRuxolitinibLike =
    "[N][#C][C][C][Branch1][Branch2][C][C][C][C][C][Ring1][Branch1][N][C][=C][Branch1][=C][C][=N]"
    "[C][=N][C][N][C][=C][C][Ring1][=Branch2][Ring1][Branch1][C][=N][Ring1][=C]"
    "[Branch1][Branch1][Branch1][Branch1][Branch1]";

namespace {

// Reference optima of the bundled scorers (reference_space enumeration).
struct Optimum {
  int k;
  double plogp;
  double drug;
};
constexpr Optimum kOptima[] = {
    {6, -2.5866, 0.510027},
    {7, -2.9767, 0.496105},
    {8, -3.3668, 0.489363},
    {9, -3.7569, 0.461482},
};

RunConfig small_space(int k, bool drug) {
  RunConfig cfg;
  cfg.name = (drug ? "drug_k" : "plogp_k") + std::to_string(k);
  cfg.tokens = k;
  cfg.shots = 1024;
  if (drug) cfg.scorer = ScorerSpec::parse("drug{2,1,0}");
  for (const auto& o : kOptima) {
    if (o.k == k) cfg.loss.p0 = drug ? o.drug : o.plogp;
  }
  cfg.loss.lambda = 0.1;
  cfg.optimizer.method = opt::Method::Imfil;
  cfg.optimizer.max_iterations = 300;
  cfg.optimizer.convergence_eps = 1e-4;
  cfg.optimizer.imfil.initial_scale = 0.8;
  cfg.optimizer.imfil.scale_decay = 0.5;
  cfg.optimizer.imfil.min_scale = 0.05;
  cfg.optimizer.imfil.max_stencil_failures = 2;
  cfg.reference_cache = ".qevo-cache/" + std::string(drug ? "drug" : "plogp") + "_k" + std::to_string(k) + ".ref";
  return cfg;
}

RunConfig jak2(bool biased) {
  RunConfig cfg;
  cfg.name = biased ? "jak2_40tok_biased" : "jak2_40tok_unbiased";
  cfg.vocabulary = "table_2_4";
  cfg.tokens = 40;
  cfg.family = sim::Family::BY;
  cfg.init = biased ? InitMode::Biased : InitMode::Uniform;
  if (biased) cfg.target = kRuxolitinibLike;
  cfg.shots = 10240;
  cfg.scorer = ScorerSpec::parse(std::string("drug{2,1,2,") + kRuxolitinibLike + "}");
  cfg.loss.p0 = 0.0;
  cfg.loss.lambda = 0.1;
  cfg.optimizer.method = opt::Method::Spsa;
  cfg.optimizer.max_iterations = 200;
  cfg.optimizer.convergence_eps = 1e-4;
  cfg.optimizer.spsa.resamplings = 50;
  return cfg;
}

template <class T>
T required_value(const toml::node& node, std::string_view key) {
  if (auto v = node.value<T>()) return *v;
  throw Error(Errc::InvalidConfig, "key '" + std::string(key) + "' has the wrong type");
}

class Reader {
 public:
  Reader(const toml::table& table, std::string section) : table_(table), section_(std::move(section)) {}

  template <class T>
  void get(std::string_view key, T& out) {
    seen_.insert(std::string(key));
    if (const auto* node = table_.get(key)) out = required_value<T>(*node, qualified(key));
  }

  const toml::table* sub(std::string_view key) {
    seen_.insert(std::string(key));
    const auto* node = table_.get(key);
    if (!node) return nullptr;
    if (const auto* t = node->as_table()) return t;
    throw Error(Errc::InvalidConfig, "'" + qualified(key) + "' must be a table");
  }

  void reject_unknown() const {
    for (const auto& [key, node] : table_) {
      if (!seen_.count(std::string(key.str()))) {
        throw Error(Errc::InvalidConfig, "unknown key '" + qualified(key.str()) + "'");
      }
    }
  }

 private:
  std::string qualified(std::string_view key) const {
    return section_.empty() ? std::string(key) : section_ + "." + std::string(key);
  }

  const toml::table& table_;
  std::string section_;
  std::set<std::string> seen_;
};

void read_section(const toml::table* t, const std::string& name, auto&& body) {
  if (!t) return;
  Reader r(*t, name);
  body(r);
  r.reject_unknown();
}

std::uint64_t to_u64(std::int64_t v, std::string_view key) {
  if (v < 0) throw Error(Errc::InvalidConfig, std::string(key) + " must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

InitMode parse_init_mode(std::string_view s) {
  if (s == "uniform") return InitMode::Uniform;
  if (s == "random") return InitMode::Random;
  if (s == "biased") return InitMode::Biased;
  throw Error(Errc::InvalidConfig, "unknown init mode '" + std::string(s) + "'");
}

std::string_view to_string(InitMode m) noexcept {
  switch (m) {
    case InitMode::Uniform: return "uniform";
    case InitMode::Random: return "random";
    case InitMode::Biased: return "biased";
  }
  return "uniform";
}

sim::AnsatzSpec RunConfig::ansatz(int bits_per_token) const {
  sim::AnsatzSpec spec;
  spec.family = family;
  spec.num_output_bits = tokens * bits_per_token;
  spec.statevector_cap = statevector_cap;
  spec.ra_method = ra_method;
  return spec;
}

void RunConfig::validate() const {
  const auto vocab = codec::TokenVocabulary::resolve(vocabulary);
  if (tokens < 1) throw Error(Errc::InvalidConfig, "tokens must be at least 1");
  if (shots < 1) throw Error(Errc::InvalidConfig, "shots must be at least 1");
  if (statevector_cap < 1 || statevector_cap > sim::kHardStatevectorMax) {
    throw Error(Errc::InvalidConfig, "statevector_cap must be in [1, " + std::to_string(sim::kHardStatevectorMax) + "]");
  }
  if (family == sim::Family::RA && ra_method == sim::RaMethod::Statevector &&
      tokens * vocab.bits_per_token() > statevector_cap) {
    throw Error(Errc::TooManyQubits, "statevector sampling needs at most " + std::to_string(statevector_cap) + " qubits");
  }
  const selfies::SymbolTable table(vocab);  // every token must be decodable
  (void)table;
  if (init == InitMode::Biased) {
    if (target.empty()) throw Error(Errc::InvalidConfig, "biased init requires a target");
    const auto tokens_ = codec::split_selfies(target);
    codec::encode_tokens(tokens_, vocab, static_cast<std::size_t>(tokens));
    if (!selfies::decode_molecule(std::string_view(target)).valid()) {
      throw Error(Errc::InvalidConfig, "biased init target does not decode to a molecule");
    }
  }
  Scorer scorer_check(scorer);
  (void)scorer_check;
  if (loss.lambda < 0) throw Error(Errc::InvalidConfig, "loss.lambda must be nonnegative");
  const auto& o = optimizer;
  if (o.max_iterations < 0) throw Error(Errc::InvalidConfig, "optimizer.max_iterations must be nonnegative");
  if (o.convergence_eps < 0) throw Error(Errc::InvalidConfig, "optimizer.convergence_eps must be nonnegative");
  if (o.window < 2) throw Error(Errc::InvalidConfig, "optimizer.window must be at least 2");
  if (o.method == opt::Method::Spsa) {
    if (o.spsa.resamplings < 1) throw Error(Errc::InvalidConfig, "optimizer.spsa.resamplings must be at least 1");
    if (o.spsa.c <= 0) throw Error(Errc::InvalidConfig, "optimizer.spsa.c must be positive");
  } else {
    opt::Imfil check(o.imfil);
    (void)check;
  }
}

std::string RunConfig::to_toml() const {
  toml::table space{{"vocabulary", vocabulary}, {"tokens", tokens}};
  toml::table ansatz_t{{"family", std::string(sim::to_string(family))},
                       {"init", std::string(to_string(init))},
                       {"statevector_cap", statevector_cap},
                       {"ra_method", ra_method == sim::RaMethod::Auto    ? "auto"
                                     : ra_method == sim::RaMethod::Chain ? "chain"
                                                                         : "statevector"}};
  if (!target.empty()) ansatz_t.insert("target", target);
  toml::table sampling{{"shots", static_cast<std::int64_t>(shots)}, {"seed", static_cast<std::int64_t>(seed)}};
  toml::table scorer_t{{"name", scorer.id().substr(0, scorer.id().find('+'))},
                       {"large_ring_branch", scorer.branch == chem::LargeRingBranch::Literal ? "literal" : "penalize"}};
  toml::table loss_t{{"p0", loss.p0}, {"lambda", loss.lambda}, {"reg_form", std::string(to_string(loss.reg_form))}};
  const auto& o = optimizer;
  toml::table spsa{{"a", o.spsa.a},
                   {"c", o.spsa.c},
                   {"A", o.spsa.A},
                   {"alpha", o.spsa.alpha},
                   {"gamma", o.spsa.gamma},
                   {"resamplings", o.spsa.resamplings},
                   {"target_step", o.spsa.target_step},
                   {"calibration_samples", o.spsa.calibration_samples}};
  toml::table imfil{{"initial_scale", o.imfil.initial_scale},
                    {"scale_decay", o.imfil.scale_decay},
                    {"min_scale", o.imfil.min_scale},
                    {"max_stencil_failures", o.imfil.max_stencil_failures}};
  toml::table optimizer_t{{"method", std::string(opt::to_string(o.method))},
                          {"max_iterations", o.max_iterations},
                          {"convergence_eps", o.convergence_eps},
                          {"window", o.window},
                          {"spsa", std::move(spsa)},
                          {"imfil", std::move(imfil)}};
  toml::table output{{"dir", output_dir.generic_string()}, {"reference_cache", reference_cache.generic_string()}};
  toml::table root{{"name", name},           {"space", std::move(space)},   {"ansatz", std::move(ansatz_t)},
                   {"sampling", std::move(sampling)}, {"scorer", std::move(scorer_t)}, {"loss", std::move(loss_t)},
                   {"optimizer", std::move(optimizer_t)}, {"output", std::move(output)}};
  std::ostringstream os;
  os << toml::toml_formatter(root, toml::toml_formatter::default_flags & ~toml::format_flags::indentation);
  os << '\n';
  return os.str();
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "plogp_k6", "plogp_k7", "plogp_k8", "plogp_k9",           "drug_k6",
      "drug_k7",  "drug_k8",  "drug_k9",  "jak2_40tok_unbiased", "jak2_40tok_biased"};
  return names;
}

RunConfig preset(std::string_view name) {
  for (int k = 6; k <= 9; ++k) {
    if (name == "plogp_k" + std::to_string(k)) return small_space(k, false);
    if (name == "drug_k" + std::to_string(k)) return small_space(k, true);
  }
  if (name == "jak2_40tok_unbiased") return jak2(false);
  if (name == "jak2_40tok_biased") return jak2(true);
  throw Error(Errc::UnknownPreset, "unknown preset '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& err) {
    std::ostringstream os;
    os << "TOML parse error at line " << err.source().begin.line << ": " << err.description();
    throw Error(Errc::InvalidConfig, os.str());
  }
  RunConfig cfg;
  if (const auto* p = root.get("preset")) cfg = preset(required_value<std::string>(*p, "preset"));

  Reader top(root, "");
  std::string ignored_preset;
  top.get("preset", ignored_preset);
  top.get("name", cfg.name);
  read_section(top.sub("space"), "space", [&](Reader& r) {
    r.get("vocabulary", cfg.vocabulary);
    std::int64_t k = cfg.tokens;
    r.get("tokens", k);
    cfg.tokens = static_cast<int>(k);
  });
  read_section(top.sub("ansatz"), "ansatz", [&](Reader& r) {
    std::string family(sim::to_string(cfg.family)), init(to_string(cfg.init)), method;
    std::int64_t cap = cfg.statevector_cap;
    r.get("family", family);
    r.get("init", init);
    r.get("target", cfg.target);
    r.get("statevector_cap", cap);
    r.get("ra_method", method);
    cfg.family = sim::parse_family(family);
    cfg.init = parse_init_mode(init);
    cfg.statevector_cap = static_cast<int>(cap);
    if (!method.empty()) cfg.ra_method = sim::parse_ra_method(method);
  });
  read_section(top.sub("sampling"), "sampling", [&](Reader& r) {
    std::int64_t shots = static_cast<std::int64_t>(cfg.shots), seed = static_cast<std::int64_t>(cfg.seed);
    r.get("shots", shots);
    r.get("seed", seed);
    cfg.shots = to_u64(shots, "sampling.shots");
    cfg.seed = to_u64(seed, "sampling.seed");
  });
  read_section(top.sub("scorer"), "scorer", [&](Reader& r) {
    std::string name, branch;
    r.get("name", name);
    r.get("large_ring_branch", branch);
    if (!name.empty()) {
      const auto old_branch = cfg.scorer.branch;
      cfg.scorer = ScorerSpec::parse(name);
      cfg.scorer.branch = old_branch;
    }
    if (branch == "literal") {
      cfg.scorer.branch = chem::LargeRingBranch::Literal;
    } else if (branch == "penalize") {
      cfg.scorer.branch = chem::LargeRingBranch::Penalize;
    } else if (!branch.empty()) {
      throw Error(Errc::InvalidConfig, "scorer.large_ring_branch must be literal or penalize");
    }
  });
  read_section(top.sub("loss"), "loss", [&](Reader& r) {
    std::string reg;
    r.get("p0", cfg.loss.p0);
    r.get("lambda", cfg.loss.lambda);
    r.get("reg_form", reg);
    if (!reg.empty()) cfg.loss.reg_form = parse_reg_form(reg);
  });
  read_section(top.sub("optimizer"), "optimizer", [&](Reader& r) {
    auto& o = cfg.optimizer;
    std::string method;
    std::int64_t max_it = o.max_iterations, window = o.window, seed = static_cast<std::int64_t>(o.seed);
    r.get("method", method);
    r.get("max_iterations", max_it);
    r.get("convergence_eps", o.convergence_eps);
    r.get("window", window);
    r.get("seed", seed);
    if (!method.empty()) o.method = opt::parse_method(method);
    o.max_iterations = static_cast<int>(max_it);
    o.window = static_cast<int>(window);
    o.seed = to_u64(seed, "optimizer.seed");
    read_section(r.sub("spsa"), "optimizer.spsa", [&](Reader& s) {
      std::int64_t resamplings = o.spsa.resamplings, samples = o.spsa.calibration_samples;
      s.get("a", o.spsa.a);
      s.get("c", o.spsa.c);
      s.get("A", o.spsa.A);
      s.get("alpha", o.spsa.alpha);
      s.get("gamma", o.spsa.gamma);
      s.get("resamplings", resamplings);
      s.get("target_step", o.spsa.target_step);
      s.get("calibration_samples", samples);
      o.spsa.resamplings = static_cast<int>(resamplings);
      o.spsa.calibration_samples = static_cast<int>(samples);
    });
    read_section(r.sub("imfil"), "optimizer.imfil", [&](Reader& s) {
      std::int64_t failures = o.imfil.max_stencil_failures;
      s.get("initial_scale", o.imfil.initial_scale);
      s.get("scale_decay", o.imfil.scale_decay);
      s.get("min_scale", o.imfil.min_scale);
      s.get("max_stencil_failures", failures);
      o.imfil.max_stencil_failures = static_cast<int>(failures);
    });
  });
  read_section(top.sub("output"), "output", [&](Reader& r) {
    std::string dir = cfg.output_dir.string(), cache = cfg.reference_cache.string();
    r.get("dir", dir);
    r.get("reference_cache", cache);
    cfg.output_dir = dir;
    cfg.reference_cache = cache;
  });
  top.reject_unknown();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace qevo

#include "qevo/scorer.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

#include "qevo/error.hpp"
#include "qevo/selfies_decoder.hpp"

namespace qevo {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_weight(std::string_view s) {
  s = trim(s);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::InvalidConfig, "bad scorer weight '" + std::string(s) + "'");
  }
  return v;
}

std::string format_weight(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

ScorerSpec ScorerSpec::parse(std::string_view text) {
  text = trim(text);
  ScorerSpec spec;
  if (text == "plogp") return spec;
  if (text == "drug") {
    spec.kind = Kind::Drug;
    return spec;
  }
  if (!text.starts_with("drug{") || !text.ends_with("}")) {
    throw Error(Errc::InvalidConfig, "unknown scorer '" + std::string(text) + "'");
  }
  spec.kind = Kind::Drug;
  std::vector<std::string_view> fields;
  auto body = text.substr(5, text.size() - 6);
  while (true) {
    const auto comma = body.find(',');
    fields.push_back(trim(body.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  if (fields.size() > 4) throw Error(Errc::InvalidConfig, "drug scorer takes at most four fields");
  double* weights[] = {&spec.weights.alpha, &spec.weights.beta, &spec.weights.gamma};
  for (std::size_t i = 0; i < fields.size() && i < 3; ++i) {
    if (!fields[i].empty()) *weights[i] = parse_weight(fields[i]);
  }
  if (fields.size() == 4) spec.reference = std::string(fields[3]);
  return spec;
}

std::string ScorerSpec::id() const {
  if (kind == Kind::PLogP) return "plogp";
  std::string out = "drug{" + format_weight(weights.alpha) + "," + format_weight(weights.beta) + "," +
                    format_weight(weights.gamma);
  if (weights.gamma > 0) out += "," + reference;
  out += "}";
  if (branch == chem::LargeRingBranch::Penalize) out += "+penalize";
  return out;
}

Scorer::Scorer(const ScorerSpec& spec) : id_(spec.id()) {
  if (spec.kind == ScorerSpec::Kind::PLogP) {
    fn_ = chem::plogp_loss;
    return;
  }
  std::optional<chem::Fingerprint> ref;
  if (!spec.reference.empty()) {
    const auto g = selfies::decode_molecule(std::string_view(spec.reference));
    if (!g.valid()) throw Error(Errc::InvalidConfig, "reference molecule does not decode");
    ref = chem::fingerprint(g);
  }
  // Validate weights and the reference requirement up front.
  chem::drug_design_loss(chem::MoleculeGraph::invalid("probe"), spec.weights, ref, spec.branch);
  fn_ = [w = spec.weights, ref = std::move(ref), branch = spec.branch](const chem::MoleculeGraph& g) {
    return chem::drug_design_loss(g, w, ref, branch);
  };
}

}  // namespace qevo

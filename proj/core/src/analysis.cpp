#include "qevo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "qevo/error.hpp"
#include "qevo/selfies_decoder.hpp"

namespace qevo::analysis {

namespace {

std::vector<int> set_bits(const chem::Fingerprint& fp) {
  std::vector<int> out;
  for (int b = 0; b < fp.width; ++b) {
    if (fp.test(b)) out.push_back(b);
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  if (n > 0) {
    for (auto& x : v) x /= n;
  }
}

void fix_sign(std::vector<double>& v) {
  const auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (it != v.end() && *it < 0) {
    for (auto& x : v) x = -x;
  }
}

int window_of(int iteration, int total) {
  if (iteration < 0 || total <= 0) return -1;
  return std::min(5, iteration * 6 / total);
}

}  // namespace

std::array<double, 2> PcaModel::project(const chem::Fingerprint& fp) const {
  std::array<double, 2> out{};
  for (std::size_t c = 0; c < 2 && c < components.size(); ++c) {
    double s = 0.0;
    for (int b = 0; b < width; ++b) s += ((fp.test(b) ? 1.0 : 0.0) - mean[b]) * components[c][b];
    out[c] = s;
  }
  return out;
}

PcaModel fit_pca(const std::vector<chem::Fingerprint>& fps, int components, double tol, int max_iterations) {
  std::set<std::vector<std::uint64_t>> distinct;
  for (const auto& fp : fps) {
    distinct.insert(fp.words);
    if (distinct.size() >= 3) break;
  }
  if (distinct.size() < 3) throw Error(Errc::DegenerateCovariance, "PCA needs at least 3 distinct fingerprints");
  const int w = fps.front().width;
  for (const auto& fp : fps) {
    if (fp.width != w) throw Error(Errc::WidthMismatch, "fingerprints differ in width");
  }
  const auto n = static_cast<double>(fps.size());
  const auto W = static_cast<std::size_t>(w);

  PcaModel model;
  model.width = w;
  model.mean.assign(W, 0.0);
  std::vector<double> cov(W * W, 0.0);
  for (const auto& fp : fps) {
    const auto bits = set_bits(fp);
    for (const int i : bits) {
      model.mean[i] += 1.0;
      for (const int j : bits) cov[i * W + j] += 1.0;
    }
  }
  for (auto& m : model.mean) m /= n;
  for (std::size_t i = 0; i < W; ++i) {
    for (std::size_t j = 0; j < W; ++j) cov[i * W + j] = cov[i * W + j] / n - model.mean[i] * model.mean[j];
  }

  const auto multiply = [&](const std::vector<double>& v) {
    std::vector<double> out(W, 0.0);
    for (std::size_t i = 0; i < W; ++i) {
      const double* row = &cov[i * W];
      double s = 0.0;
      for (std::size_t j = 0; j < W; ++j) s += row[j] * v[j];
      out[i] = s;
    }
    return out;
  };
  const auto deflate = [&](std::vector<double>& v) {
    for (const auto& c : model.components) {
      const double d = dot(v, c);
      for (std::size_t i = 0; i < W; ++i) v[i] -= d * c[i];
    }
  };

  for (int c = 0; c < components; ++c) {
    // Deterministic start with weight on every coordinate.
    std::vector<double> v(W);
    for (std::size_t i = 0; i < W; ++i) v[i] = 1.0 + 0.01 * static_cast<double>((i * 7919) % 101);
    deflate(v);
    normalize(v);
    int it = 0;
    for (; it < max_iterations; ++it) {
      auto next = multiply(v);
      deflate(next);
      normalize(next);
      if (dot(next, next) == 0.0) break;  // v spans a null direction
      fix_sign(next);
      double diff = 0.0;
      for (std::size_t i = 0; i < W; ++i) diff += (next[i] - v[i]) * (next[i] - v[i]);
      v = std::move(next);
      if (std::sqrt(diff) < tol) break;
    }
    fix_sign(v);
    model.variances.push_back(dot(v, multiply(v)));
    model.iterations.push_back(it);
    model.components.push_back(std::move(v));
  }
  return model;
}

std::vector<chem::Fingerprint> reference_fingerprints(const ReferenceSpace& ref, const codec::TokenVocabulary& vocab) {
  std::vector<chem::Fingerprint> fps;
  fps.reserve(ref.unique_valid());
  for (const auto& e : ref.ranking()) fps.push_back(chem::fingerprint(selfies::decode_bitstring(e.bits, vocab)));
  return fps;
}

std::vector<ProjectionRow> pca_project(const ReferenceSpace& ref, const codec::TokenVocabulary& vocab,
                                       const std::vector<RunRecord>& records, PcaModel* model_out) {
  const auto fps = reference_fingerprints(ref, vocab);
  auto model = fit_pca(fps);
  std::vector<ProjectionRow> rows;
  rows.reserve(fps.size());
  for (std::size_t i = 0; i < fps.size(); ++i) {
    const auto p = model.project(fps[i]);
    rows.push_back({"reference", ref.ranking()[i].canonical, ref.ranking()[i].score, p[0], p[1], -1, -1});
  }
  for (const auto& rec : records) {
    int last = 0;
    for (const auto& m : rec.molecules) last = std::max(last, m.first_iteration + 1);
    const std::string source = rec.name + "_seed" + std::to_string(rec.seed);
    std::vector<const MoleculeLog*> order;
    for (const auto& m : rec.molecules) {
      if (m.valid) order.push_back(&m);
    }
    std::stable_sort(order.begin(), order.end(), [](const MoleculeLog* a, const MoleculeLog* b) {
      return a->first_iteration < b->first_iteration;
    });
    for (const auto* m : order) {
      const auto p = model.project(chem::fingerprint(selfies::decode_bitstring(m->bits, vocab)));
      rows.push_back({source, m->canonical, m->score, p[0], p[1], m->first_iteration, window_of(m->first_iteration, last)});
    }
  }
  if (model_out) *model_out = std::move(model);
  return rows;
}

void write_projection(const std::vector<ProjectionRow>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error(Errc::Io, "cannot write " + path.string());
  os << "source,canonical,score,pc1,pc2,first_iteration,window\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%.9f,%.9f", r.score, r.pc1, r.pc2);
    os << r.source << ',' << r.canonical << ',' << buf << ',' << r.first_iteration << ',' << r.window << '\n';
  }
}

}  // namespace qevo::analysis

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "qevo/fingerprint.hpp"
#include "qevo/qevo_driver.hpp"
#include "qevo/reference_space.hpp"

namespace qevo::analysis {

/// Principal components of a fingerprint set, largest variance first. Each
/// component is unit length with its largest-magnitude entry positive.
struct PcaModel {
  int width = 0;
  std::vector<double> mean;
  std::vector<std::vector<double>> components;
  std::vector<double> variances;  // Rayleigh quotients of the components
  std::vector<int> iterations;    // power iterations per component

  std::array<double, 2> project(const chem::Fingerprint& fp) const;
};

/// Power iteration with deflation on the covariance of mean-centred
/// fingerprints, until successive vectors differ by less than `tol`.
/// Throws DegenerateCovariance with fewer than 3 distinct fingerprints.
PcaModel fit_pca(const std::vector<chem::Fingerprint>& fps, int components = 3, double tol = 1e-9,
                 int max_iterations = 100000);

/// Fingerprints of the reference molecules, in rank order.
std::vector<chem::Fingerprint> reference_fingerprints(const ReferenceSpace& ref, const codec::TokenVocabulary& vocab);

struct ProjectionRow {
  std::string source;  // "reference" or the run name and seed
  std::string canonical;
  double score = 0.0;
  double pc1 = 0.0;
  double pc2 = 0.0;
  int first_iteration = -1;
  int window = -1;
};

/// Reference molecules and every valid molecule of each record, projected
/// onto the first two components fitted on the reference space.
std::vector<ProjectionRow> pca_project(const ReferenceSpace& ref, const codec::TokenVocabulary& vocab,
                                       const std::vector<RunRecord>& records, PcaModel* model_out = nullptr);

void write_projection(const std::vector<ProjectionRow>& rows, const std::filesystem::path& path);

}  // namespace qevo::analysis

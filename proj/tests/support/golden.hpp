#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qevo::testing {

inline std::filesystem::path golden_dir() { return QEVO_GOLDEN_DIR; }

struct GoldenRow {
  std::string bits;
  std::string smiles;
  double logp = 0.0;
  double qed = 0.0;
  double sas = 0.0;
  double drug_loss = 0.0;
};

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// Rows of logp_<k>token.golden. Lines starting with '#' and the header are skipped.
inline std::vector<GoldenRow> load_logp_golden(int k) {
  auto path = golden_dir() / ("logp_" + std::to_string(k) + "token.golden");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing golden file " + path.string());
  std::vector<GoldenRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto c = split_csv(line);
    if (c.size() != 6) throw std::runtime_error("bad golden row: " + line);
    rows.push_back({c[0], c[1], std::stod(c[2]), std::stod(c[3]), std::stod(c[4]), std::stod(c[5])});
  }
  return rows;
}

struct QedGoldenRow {
  std::string bits;
  double mw = 0.0;
  double alogp = 0.0;
  int hba = 0;
  int hbd = 0;
  double psa = 0.0;
  int rotb = 0;
  int arom = 0;
  int alerts = 0;
  double qed = 0.0;
};

// Rows of qed_<k>token.golden, same molecules and order as the logP table.
inline std::vector<QedGoldenRow> load_qed_golden(int k) {
  auto path = golden_dir() / ("qed_" + std::to_string(k) + "token.golden");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing golden file " + path.string());
  std::vector<QedGoldenRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto c = split_csv(line);
    if (c.size() != 10) throw std::runtime_error("bad golden row: " + line);
    rows.push_back({c[0], std::stod(c[1]), std::stod(c[2]), std::stoi(c[3]), std::stoi(c[4]), std::stod(c[5]),
                    std::stoi(c[6]), std::stoi(c[7]), std::stoi(c[8]), std::stod(c[9])});
  }
  return rows;
}

// k -> unique decodings from unique_counts.csv; falls back to the logP table size.
inline std::map<int, std::uint64_t> load_unique_counts() {
  std::map<int, std::uint64_t> out;
  std::ifstream in(golden_dir() / "unique_counts.csv");
  std::string line;
  bool header = true;
  while (in && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto c = split_csv(line);
    out[std::stoi(c[0])] = std::stoull(c[2]);
  }
  for (int k : {6, 7})
    if (!out.count(k)) out[k] = load_logp_golden(k).size() + 1;
  return out;
}

}  // namespace qevo::testing

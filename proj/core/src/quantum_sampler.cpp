#include "qevo/quantum_sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "qevo/error.hpp"
#include "qevo/parallel.hpp"
#include "qevo/rng.hpp"

namespace qevo::sim {

namespace {

constexpr std::uint64_t kChunk = 4096;

void check_theta(const AnsatzSpec& spec, std::span<const double> theta) {
  if (spec.num_output_bits < 1) throw Error(Errc::InvalidConfig, "ansatz needs at least one output bit");
  if (theta.size() != spec.parameter_count()) {
    throw Error(Errc::LengthMismatch, "expected " + std::to_string(spec.parameter_count()) + " angles, got " +
                                          std::to_string(theta.size()));
  }
}

struct HalfAngle {
  double c;
  double s;
};

HalfAngle half(double angle) { return {std::cos(angle / 2), std::sin(angle / 2)}; }

// <z|Ry|y>
double ry(const HalfAngle& r, int z, int y) {
  if (z == y) return r.c;
  return z == 1 ? r.s : -r.s;
}

// RealAmplitudes as a chain: after the first layer and the CNOT ladder the
// basis amplitude of y is prod_i a_i(y_i ^ y_{i-1}), so the state is a
// bond-dimension-2 product over y and qubits can be drawn left to right.
class RaChain {
 public:
  RaChain(const AnsatzSpec& spec, std::span<const double> theta) : q_(spec.num_output_bits) {
    first_.reserve(q_);
    second_.reserve(q_);
    for (int i = 0; i < q_; ++i) {
      first_.push_back(half(theta[i]));
      second_.push_back(half(theta[q_ + i]));
    }
    // Overlap of the two bond branches once qubits > i are summed out.
    overlap_.assign(q_, 1.0);
    for (int i = 0; i + 1 < q_; ++i) overlap_[i] = 2 * first_[i + 1].c * first_[i + 1].s;
  }

  // Weights of the two bond values after fixing qubit i to z.
  std::array<double, 2> step(const std::array<double, 2>& left, int i, int z) const {
    const auto& a = first_[i];
    std::array<double, 2> w{};
    for (int y = 0; y < 2; ++y) {
      const double through = left[y] * a.c + left[y ^ 1] * a.s;  // a(y ^ u) summed over u
      w[y] = through * ry(second_[i], z, y);
    }
    return w;
  }

  double mass(const std::array<double, 2>& w, int i) const {
    return w[0] * w[0] + w[1] * w[1] + 2 * w[0] * w[1] * overlap_[i];
  }

  template <class Rng>
  void draw(Rng& rng, std::string& out) const {
    std::array<double, 2> left{1.0, 0.0};
    for (int i = 0; i < q_; ++i) {
      const auto w0 = step(left, i, 0);
      const auto w1 = step(left, i, 1);
      const double m0 = std::max(0.0, mass(w0, i));
      const double m1 = std::max(0.0, mass(w1, i));
      const int z = rng.uniform() * (m0 + m1) < m0 ? 0 : 1;
      const auto& w = z ? w1 : w0;
      const double norm = std::sqrt(z ? m1 : m0);
      left = {w[0] / norm, w[1] / norm};
      out[i] = static_cast<char>('0' + z);
    }
  }

  double probability(std::string_view bits) const {
    std::array<double, 2> left{1.0, 0.0};
    double p = 1.0;
    for (int i = 0; i < q_; ++i) {
      const int z = bits[i] == '1';
      const auto w = step(left, i, z);
      const double m = mass(w, i);
      if (m <= 0) return 0.0;
      // The left vector is kept normalised, so m is the conditional
      // probability of this qubit given the earlier ones.
      p *= m;
      const double norm = std::sqrt(m);
      left = {w[0] / norm, w[1] / norm};
    }
    return p;
  }

 private:
  int q_;
  std::vector<HalfAngle> first_;
  std::vector<HalfAngle> second_;
  std::vector<double> overlap_;
};

// Bologna-Yale cell: (emit, bond) pair; amplitudes indexed [emit][bond].
struct ByCell {
  HalfAngle r0;
  HalfAngle r1;
};

using CellState = std::array<std::array<double, 2>, 2>;

CellState apply_cell(const ByCell& cell, const std::array<double, 2>& bond) {
  CellState s{};
  // Ry on emit (starting from |0>)
  for (int b = 0; b < 2; ++b) {
    s[0][b] = cell.r0.c * bond[b];
    s[1][b] = cell.r0.s * bond[b];
  }
  std::swap(s[1][0], s[1][1]);  // CNOT emit -> bond
  CellState t{};
  for (int b = 0; b < 2; ++b) {
    t[0][b] = cell.r1.c * s[0][b] - cell.r1.s * s[1][b];
    t[1][b] = cell.r1.s * s[0][b] + cell.r1.c * s[1][b];
  }
  std::swap(t[0][1], t[1][1]);  // CNOT bond -> emit
  return t;
}

std::vector<ByCell> by_cells(const AnsatzSpec& spec, std::span<const double> theta) {
  std::vector<ByCell> cells;
  cells.reserve(spec.num_output_bits);
  for (int k = 0; k < spec.num_output_bits; ++k) cells.push_back({half(theta[2 * k]), half(theta[2 * k + 1])});
  return cells;
}

template <class Rng>
void by_draw(const std::vector<ByCell>& cells, Rng& rng, std::string& out) {
  std::array<double, 2> bond{1.0, 0.0};
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto s = apply_cell(cells[k], bond);
    const double p0 = s[0][0] * s[0][0] + s[0][1] * s[0][1];
    const double p1 = s[1][0] * s[1][0] + s[1][1] * s[1][1];
    const int e = rng.uniform() * (p0 + p1) < p0 ? 0 : 1;
    const double norm = std::sqrt(e ? p1 : p0);
    bond = {s[e][0] / norm, s[e][1] / norm};
    out[k] = static_cast<char>('0' + e);
  }
}

bool use_statevector(const AnsatzSpec& spec) { return spec.ra_method == RaMethod::Statevector; }

// Threads only pay off on large vectors.
void for_range(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n < (std::size_t{1} << 15)) {
    fn(0, n);
  } else {
    parallel_for(n, fn);
  }
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) { return mix64(seed ^ mix64(chunk + 1)); }

}  // namespace

void SampleHistogram::add(const std::string& bits, std::uint64_t n) {
  counts[bits] += n;
  shots += n;
}

void SampleHistogram::merge(const SampleHistogram& other) {
  for (const auto& [bits, n] : other.counts) counts[bits] += n;
  shots += other.shots;
}

std::string_view to_string(Family f) noexcept { return f == Family::RA ? "ra" : "by"; }

Family parse_family(std::string_view s) {
  if (s == "ra" || s == "RA") return Family::RA;
  if (s == "by" || s == "BY") return Family::BY;
  throw Error(Errc::InvalidConfig, "unknown ansatz '" + std::string(s) + "'");
}

RaMethod parse_ra_method(std::string_view s) {
  if (s == "auto") return RaMethod::Auto;
  if (s == "chain") return RaMethod::Chain;
  if (s == "statevector") return RaMethod::Statevector;
  throw Error(Errc::InvalidConfig, "unknown ra_method '" + std::string(s) + "'");
}

std::vector<double> ra_statevector(const AnsatzSpec& spec, std::span<const double> theta) {
  if (spec.family != Family::RA) throw Error(Errc::InvalidConfig, "statevector is defined for the RA ansatz");
  check_theta(spec, theta);
  const int q = spec.num_output_bits;
  const int cap = std::min(spec.statevector_cap, kHardStatevectorMax);
  if (q > cap) {
    throw Error(Errc::TooManyQubits, std::to_string(q) + " qubits exceed the statevector cap of " + std::to_string(cap));
  }
  const std::size_t dim = std::size_t{1} << q;
  std::vector<double> psi(dim, 0.0);
  psi[0] = 1.0;
  const auto mask = [q](int qubit) { return std::size_t{1} << (q - 1 - qubit); };
  const auto rotate = [&](int qubit, double angle) {
    const auto [c, s] = half(angle);
    const std::size_t m = mask(qubit);
    for_range(dim / 2, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        // j enumerates indices with the target bit cleared
        const std::size_t i0 = ((j & ~(m - 1)) << 1) | (j & (m - 1));
        const std::size_t i1 = i0 | m;
        const double a = psi[i0];
        const double b = psi[i1];
        psi[i0] = c * a - s * b;
        psi[i1] = s * a + c * b;
      }
    });
  };
  for (int i = 0; i < q; ++i) rotate(i, theta[i]);
  for (int i = 0; i + 1 < q; ++i) {
    const std::size_t control = mask(i);
    const std::size_t target = mask(i + 1);
    for_range(dim, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t x = lo; x < hi; ++x) {
        if ((x & control) && !(x & target)) std::swap(psi[x], psi[x | target]);
      }
    });
  }
  for (int i = 0; i < q; ++i) rotate(i, theta[q + i]);
  return psi;
}

double probability(const AnsatzSpec& spec, std::span<const double> theta, std::string_view bits) {
  check_theta(spec, theta);
  if (bits.size() != static_cast<std::size_t>(spec.num_output_bits)) {
    throw Error(Errc::LengthMismatch, "bitstring width does not match the ansatz");
  }
  if (spec.family == Family::RA) return RaChain(spec, theta).probability(bits);
  const auto cells = by_cells(spec, theta);
  std::array<double, 2> bond{1.0, 0.0};
  double p = 1.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto s = apply_cell(cells[k], bond);
    const int e = bits[k] == '1';
    const double pe = s[e][0] * s[e][0] + s[e][1] * s[e][1];
    if (pe <= 0) return 0.0;
    p *= pe;
    const double norm = std::sqrt(pe);
    bond = {s[e][0] / norm, s[e][1] / norm};
  }
  return p;
}

SampleHistogram sample(const AnsatzSpec& spec, std::span<const double> theta, std::uint64_t shots,
                       std::uint64_t seed) {
  check_theta(spec, theta);
  if (shots < 1) throw Error(Errc::InvalidConfig, "shots must be at least 1");
  const int q = spec.num_output_bits;
  const std::uint64_t chunks = (shots + kChunk - 1) / kChunk;
  std::vector<SampleHistogram> parts(chunks);

  if (spec.family == Family::RA && use_statevector(spec)) {
    auto cdf = ra_statevector(spec, theta);
    double acc = 0;
    for (auto& v : cdf) v = acc += v * v;
    parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
      std::string bits(q, '0');
      for (std::size_t c = lo; c < hi; ++c) {
        Philox rng(chunk_seed(seed, c));
        const std::uint64_t n = std::min(kChunk, shots - c * kChunk);
        for (std::uint64_t s = 0; s < n; ++s) {
          const double u = rng.uniform() * acc;
          auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
          idx = std::min(idx, cdf.size() - 1);
          for (int i = 0; i < q; ++i) bits[i] = static_cast<char>('0' + ((idx >> (q - 1 - i)) & 1));
          parts[c].add(bits);
        }
      }
    });
  } else if (spec.family == Family::RA) {
    const RaChain chain(spec, theta);
    parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
      std::string bits(q, '0');
      for (std::size_t c = lo; c < hi; ++c) {
        Philox rng(chunk_seed(seed, c));
        const std::uint64_t n = std::min(kChunk, shots - c * kChunk);
        for (std::uint64_t s = 0; s < n; ++s) {
          chain.draw(rng, bits);
          parts[c].add(bits);
        }
      }
    });
  } else {
    const auto cells = by_cells(spec, theta);
    parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
      std::string bits(q, '0');
      for (std::size_t c = lo; c < hi; ++c) {
        Philox rng(chunk_seed(seed, c));
        const std::uint64_t n = std::min(kChunk, shots - c * kChunk);
        for (std::uint64_t s = 0; s < n; ++s) {
          by_draw(cells, rng, bits);
          parts[c].add(bits);
        }
      }
    });
  }

  SampleHistogram out = std::move(parts[0]);
  for (std::size_t c = 1; c < parts.size(); ++c) out.merge(parts[c]);
  return out;
}

ParameterVector uniform_init(const AnsatzSpec& spec) {
  const auto q = static_cast<std::size_t>(spec.num_output_bits);
  ParameterVector theta(2 * q, 0.0);
  constexpr double kHalfPi = std::numbers::pi / 2;
  if (spec.family == Family::RA) {
    std::fill(theta.begin() + q, theta.end(), kHalfPi);
  } else {
    for (std::size_t k = 0; k < q; ++k) theta[2 * k + 1] = kHalfPi;
  }
  return theta;
}

ParameterVector random_init(const AnsatzSpec& spec, std::uint64_t seed) {
  Philox rng(seed, 0x1a17);
  ParameterVector theta(spec.parameter_count());
  for (auto& t : theta) t = rng.uniform() * std::numbers::pi;
  return theta;
}

ParameterVector biased_init(const AnsatzSpec& spec, std::string_view target) {
  const auto q = static_cast<std::size_t>(spec.num_output_bits);
  if (target.size() != q) {
    throw Error(Errc::LengthMismatch, "target has " + std::to_string(target.size()) + " bits, ansatz has " +
                                          std::to_string(q));
  }
  ParameterVector theta(2 * q, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    if (target[i] != '0' && target[i] != '1') throw Error(Errc::InvalidConfig, "target must be a bitstring");
    const double angle = target[i] == '1' ? std::numbers::pi : 0.0;
    theta[spec.family == Family::RA ? q + i : 2 * i + 1] = angle;
  }
  return theta;
}

}  // namespace qevo::sim

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qevo::sim {

enum class Family { RA, BY };

/// How RealAmplitudes shots are drawn. `Chain` samples qubit by qubit from
/// the bond-dimension-2 form of the circuit and has no qubit limit;
/// `Statevector` materialises all 2^q amplitudes.
enum class RaMethod { Auto, Chain, Statevector };

inline constexpr int kDefaultStatevectorCap = 24;
inline constexpr int kHardStatevectorMax = 27;

struct AnsatzSpec {
  Family family = Family::RA;
  int num_output_bits = 0;
  int statevector_cap = kDefaultStatevectorCap;
  RaMethod ra_method = RaMethod::Auto;

  /// Two angles per output bit for both families.
  std::size_t parameter_count() const noexcept { return 2 * static_cast<std::size_t>(num_output_bits); }
};

using ParameterVector = std::vector<double>;

struct SampleHistogram {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t shots = 0;

  std::size_t unique_count() const noexcept { return counts.size(); }
  void add(const std::string& bits, std::uint64_t n = 1);
  void merge(const SampleHistogram& other);
};

std::string_view to_string(Family f) noexcept;
Family parse_family(std::string_view s);
RaMethod parse_ra_method(std::string_view s);

/// Real amplitudes of U(theta)|0>, index bit q-1-i holds qubit i so the
/// index reads like the bitstring. Throws TooManyQubits above the cap.
std::vector<double> ra_statevector(const AnsatzSpec& spec, std::span<const double> theta);

/// Exact probability of one bitstring (RA via the chain contraction, BY by
/// propagating the bond qubit). Cheap for any width.
double probability(const AnsatzSpec& spec, std::span<const double> theta, std::string_view bits);

/// Draws `shots` bitstrings. Shots are split into fixed-size chunks, each
/// with its own generator stream, so the result depends only on the seed.
SampleHistogram sample(const AnsatzSpec& spec, std::span<const double> theta, std::uint64_t shots,
                       std::uint64_t seed);

/// First layer 0, second layer pi/2: the uniform superposition.
ParameterVector uniform_init(const AnsatzSpec& spec);
/// Angles i.i.d. uniform on [0, pi].
ParameterVector random_init(const AnsatzSpec& spec, std::uint64_t seed);
/// Basis state `target`; throws LengthMismatch.
ParameterVector biased_init(const AnsatzSpec& spec, std::string_view target);

}  // namespace qevo::sim

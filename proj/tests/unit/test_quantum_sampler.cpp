#include <gtest/gtest.h>
#include <sys/resource.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "qevo/error.hpp"
#include "qevo/quantum_sampler.hpp"
#include "qevo/rng.hpp"

namespace qevo::sim {
namespace {

AnsatzSpec spec_of(Family f, int q) {
  AnsatzSpec s;
  s.family = f;
  s.num_output_bits = q;
  return s;
}

std::string bits_of(std::uint64_t x, int q) {
  std::string s(q, '0');
  for (int i = 0; i < q; ++i)
    if ((x >> (q - 1 - i)) & 1u) s[i] = '1';
  return s;
}

long peak_rss_kb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;
}

TEST(Sampler, UniformInitStatevectorIsFlat) {
  auto spec = spec_of(Family::RA, 18);
  auto amps = ra_statevector(spec, uniform_init(spec));
  ASSERT_EQ(amps.size(), 1u << 18);
  const double expect = 1.0 / std::sqrt(double(1u << 18));
  double worst = 0.0;
  for (double a : amps) worst = std::max(worst, std::abs(a - expect));
  EXPECT_LT(worst, 1e-12);
}

TEST(Sampler, UniformInitPassesChiSquare) {
  for (Family f : {Family::RA, Family::BY}) {
    auto spec = spec_of(f, 6);
    const std::uint64_t shots = 100000;
    auto hist = sample(spec, uniform_init(spec), shots, 11);
    ASSERT_EQ(hist.shots, shots);
    double expect = double(shots) / 64.0, chi2 = 0.0;
    for (std::uint64_t x = 0; x < 64; ++x) {
      auto it = hist.counts.find(bits_of(x, 6));
      double n = it == hist.counts.end() ? 0.0 : double(it->second);
      chi2 += (n - expect) * (n - expect) / expect;
    }
    double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(63), chi2));
    EXPECT_GT(p, 0.001) << to_string(f) << " chi2 " << chi2;
  }
}

TEST(Sampler, BiasedInitIsDeterministic) {
  Philox rng(2024);
  for (Family f : {Family::RA, Family::BY}) {
    auto spec = spec_of(f, 12);
    for (int t = 0; t < 20; ++t) {
      auto target = bits_of(rng.below(1u << 12), 12);
      auto theta = biased_init(spec, target);
      auto hist = sample(spec, theta, 2048, 5 + t);
      ASSERT_EQ(hist.unique_count(), 1u) << target;
      EXPECT_EQ(hist.counts.begin()->first, target);
      EXPECT_NEAR(probability(spec, theta, target), 1.0, 1e-12);
    }
  }
}

TEST(Sampler, BiasedInitChecksWidth) {
  auto spec = spec_of(Family::RA, 6);
  try {
    biased_init(spec, "0101");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
}

TEST(Sampler, ChainMatchesStatevector) {
  auto spec = spec_of(Family::RA, 10);
  auto theta = random_init(spec, 9);
  auto amps = ra_statevector(spec, theta);
  double total = 0.0, worst = 0.0;
  for (std::uint64_t x = 0; x < amps.size(); ++x) {
    double p = probability(spec, theta, bits_of(x, 10));
    total += p;
    worst = std::max(worst, std::abs(p - amps[x] * amps[x]));
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_LT(worst, 1e-14);
}

TEST(Sampler, ChainAndStatevectorSamplesAgree) {
  auto chain = spec_of(Family::RA, 8);
  chain.ra_method = RaMethod::Chain;
  auto sv = chain;
  sv.ra_method = RaMethod::Statevector;
  auto theta = random_init(chain, 4);
  auto a = sample(chain, theta, 100000, 1), b = sample(sv, theta, 100000, 2);
  double tv = 0.0;
  for (std::uint64_t x = 0; x < 256; ++x) {
    auto key = bits_of(x, 8);
    double pa = a.counts.count(key) ? double(a.counts[key]) : 0.0;
    double pb = b.counts.count(key) ? double(b.counts[key]) : 0.0;
    tv += std::abs(pa - pb) / 2e5;
  }
  EXPECT_LT(tv, 0.03);
}

TEST(Sampler, StatevectorCapIsEnforced) {
  auto spec = spec_of(Family::RA, 20);
  spec.statevector_cap = 16;
  try {
    ra_statevector(spec, uniform_init(spec));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooManyQubits);
  }
  spec.ra_method = RaMethod::Statevector;
  EXPECT_THROW(sample(spec, uniform_init(spec), 10, 1), Error);
}

TEST(Sampler, ParameterCountIsChecked) {
  auto spec = spec_of(Family::BY, 6);
  std::vector<double> theta(5, 0.0);
  EXPECT_THROW(sample(spec, theta, 10, 1), Error);
}

TEST(Sampler, SameSeedSameHistogram) {
  auto spec = spec_of(Family::BY, 12);
  auto theta = random_init(spec, 3);
  auto a = sample(spec, theta, 10000, 77), b = sample(spec, theta, 10000, 77);
  EXPECT_EQ(a.counts, b.counts);
}

TEST(ByteSampler, FortyTokenSamplingStaysSmall) {
  auto spec = spec_of(Family::BY, 160);
  auto theta = random_init(spec, 1);
  long before = peak_rss_kb();
  auto hist = sample(spec, theta, 4096, 1);
  long grown = peak_rss_kb() - before;
  EXPECT_EQ(hist.shots, 4096u);
  for (const auto& [bits, n] : hist.counts) ASSERT_EQ(bits.size(), 160u);
  EXPECT_LT(grown, 64 * 1024);
  double p = probability(spec, theta, hist.counts.begin()->first);
  EXPECT_GT(p, 0.0);
  EXPECT_LE(p, 1.0);
}

TEST(ByteSampler, ProductStatesMatchRealAmplitudes) {
  const int q = 6;
  Philox rng(8);
  auto ra = spec_of(Family::RA, q), by = spec_of(Family::BY, q);
  std::vector<double> t_ra(2 * q, 0.0), t_by(2 * q, 0.0);
  for (int i = 0; i < q; ++i) {
    double phi = 0.3 + 2.5 * rng.uniform();
    t_ra[q + i] = phi;
    t_by[2 * i + 1] = phi;
  }
  const std::uint64_t shots = 100000;
  auto h = sample(by, t_by, shots, 21);
  auto h_ra = sample(ra, t_ra, shots, 22);
  double tv_exact = 0.0, tv_sampled = 0.0;
  for (std::uint64_t x = 0; x < (1u << q); ++x) {
    auto key = bits_of(x, q);
    double pb = h.counts.count(key) ? double(h.counts[key]) / shots : 0.0;
    double pr = h_ra.counts.count(key) ? double(h_ra.counts[key]) / shots : 0.0;
    EXPECT_NEAR(probability(by, t_by, key), probability(ra, t_ra, key), 1e-12);
    tv_exact += std::abs(pb - probability(ra, t_ra, key)) / 2;
    tv_sampled += std::abs(pb - pr) / 2;
  }
  EXPECT_LT(tv_exact, 0.02);
  EXPECT_LT(tv_sampled, 0.02);
}

}  // namespace
}  // namespace qevo::sim

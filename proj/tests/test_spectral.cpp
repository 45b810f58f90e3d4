#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "spatspec/geometry.hpp"
#include "spatspec/numerics.hpp"
#include "spatspec/spectral.hpp"

namespace sp = spatspec::spectral;
namespace geo = spatspec::geometry;
namespace nm = spatspec::numerics;
using spatspec::DomainError;

namespace {

constexpr double kW = 2.16e9;

sp::SpectralSettings gaussian_rc() {
  sp::SpectralSettings s;
  s.W = kW;
  return s;
}

sp::SpectralSettings box_pair() {
  sp::SpectralSettings s;
  s.W = kW;
  s.psd_shape = sp::PsdShape::rectangular;
  s.filter_shape = sp::FilterShape::ideal;
  return s;
}

const geo::Band kBand{58e9, 64e9, kW};
const geo::ReceiverAnchor kAnchor{10.0, 62e9};

}  // namespace

TEST(Upsilon, FarOffsetVanishes) {
  for (auto settings : {gaussian_rc(), box_pair()}) {
    const sp::SpectralProfile prof(settings);
    EXPECT_NEAR(prof.upsilon(100 * kW), 0.0, 1e-9);
    EXPECT_NEAR(prof.upsilon_exact(100 * kW), 0.0, 1e-9);
  }
}

TEST(Upsilon, OverlapOfTwoBoxes) {
  const sp::SpectralProfile prof(box_pair());
  EXPECT_NEAR(prof.upsilon_exact(0.0), 1.0, 1e-12);
  EXPECT_NEAR(prof.upsilon_exact(kW), 0.0, 1e-12);
  EXPECT_NEAR(prof.upsilon_exact(kW / 2), 0.5, 1e-12);
  EXPECT_NEAR(prof.upsilon_exact(kW / 4), 0.75, 1e-12);
  EXPECT_NEAR(prof.upsilon(kW / 2), 0.5, 1e-9);
  EXPECT_NEAR(prof.upsilon(0.0), 1.0, 1e-9);
  EXPECT_EQ(prof.upsilon(kW), 0.0);
}

TEST(Upsilon, GaussianThroughRaisedCosineAgainstRiemannSum) {
  const sp::SpectralProfile prof(gaussian_rc());
  const double omega = kW;
  const int n = 100'000;
  const double h = kW / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = -kW / 2 + (i + 0.5) * h;
    sum += prof.psd(f - omega) * prof.filter_gain(f) * h;
  }
  EXPECT_NEAR(prof.upsilon_exact(omega) / sum, 1.0, 1e-8);
  EXPECT_NEAR(prof.upsilon(omega), sum, 1e-6 * prof.upsilon0());
}

TEST(Upsilon, UnitPowerPsdAndUnitFilterGain) {
  for (auto settings : {gaussian_rc(), box_pair()}) {
    const sp::SpectralProfile prof(settings);
    const double span = 3.0 * kW;
    const double power = nm::integrate([&](double f) { return prof.psd(f); }, -span, -kW / 2) +
                         nm::integrate([&](double f) { return prof.psd(f); }, -kW / 2, kW / 2) +
                         nm::integrate([&](double f) { return prof.psd(f); }, kW / 2, span);
    EXPECT_NEAR(power, 1.0, 1e-10);
    EXPECT_EQ(prof.filter_gain(0.0), 1.0);
    EXPECT_EQ(prof.filter_gain(0.51 * kW), 0.0);
  }
}

TEST(Upsilon, RaisedCosineEdges) {
  const sp::SpectralProfile prof(gaussian_rc());
  const double flat = 0.75 * kW / (2 * 1.25);
  EXPECT_EQ(prof.filter_gain(flat), 1.0);
  EXPECT_NEAR(prof.filter_gain(0.5 * (flat + kW / 2)), 0.5, 1e-12);
  EXPECT_NEAR(prof.filter_gain(kW / 2), 0.0, 1e-15);
}

TEST(Upsilon, NonNegativeNonIncreasing) {
  for (auto settings : {gaussian_rc(), box_pair()}) {
    const sp::SpectralProfile prof(settings);
    double prev = prof.upsilon0();
    for (int i = 0; i <= 1000; ++i) {
      const double w = 2.0 * kW * i / 1000;
      const double v = prof.upsilon(w);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, prev + 1e-15) << w;
      prev = v;
    }
  }
}

TEST(Upsilon, CacheWithinBudgetEverywhere) {
  std::mt19937_64 rng(31);
  for (auto settings : {gaussian_rc(), box_pair()}) {
    const sp::SpectralProfile prof(settings);
    EXPECT_LE(prof.grid_error(), 1e-6 * prof.upsilon0());
    std::uniform_real_distribution<double> omega(0.0, 2.0 * kW);
    for (int i = 0; i < 3000; ++i) {
      const double w = omega(rng);
      EXPECT_NEAR(prof.upsilon(w), prof.upsilon_exact(w), 1e-6 * prof.upsilon0()) << w;
    }
  }
}

TEST(Upsilon, InvalidSettings) {
  auto s = gaussian_rc();
  s.rolloff = 1.5;
  EXPECT_THROW(sp::SpectralProfile{s}, DomainError);
  s = gaussian_rc();
  s.W = 0.0;
  EXPECT_THROW(sp::SpectralProfile{s}, DomainError);
}

TEST(GammaN, ZerothMomentIsBandWidth) {
  const sp::SpectralProfile prof(gaussian_rc());
  EXPECT_DOUBLE_EQ(sp::gamma_n(0, kBand, kAnchor, prof), 6e9);
  EXPECT_THROW(sp::gamma_n(-1, kBand, kAnchor, prof), DomainError);
}

TEST(GammaN, CentredCarrierIsSymmetric) {
  const sp::SpectralProfile prof(gaussian_rc());
  const geo::ReceiverAnchor centred{0.0, 61e9};
  for (int n : {1, 3}) {
    const double half = nm::integrate([&](double w) { return std::pow(prof.upsilon_exact(w), n); }, 0.0, 3e9);
    EXPECT_NEAR(sp::gamma_n(n, kBand, centred, prof) / (2.0 * half), 1.0, 1e-9);
  }
}

TEST(GammaN, FirstMomentAgainstSampling) {
  const sp::SpectralProfile prof(gaussian_rc());
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> freq(kBand.fs, kBand.fe);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += prof.upsilon(freq(rng) - kAnchor.f0);
  EXPECT_NEAR(sp::gamma_n(1, kBand, kAnchor, prof) / (6e9 * sum / n), 1.0, 0.005);
}

TEST(GammaN, StrictlyDecreasingBelowUnitPeak) {
  const sp::SpectralProfile prof(gaussian_rc());
  ASSERT_LT(prof.upsilon0(), 1.0);
  double prev = sp::gamma_n(1, kBand, kAnchor, prof);
  for (int n = 2; n <= 8; ++n) {
    const double g = sp::gamma_n(n, kBand, kAnchor, prof);
    EXPECT_LT(g, prev) << n;
    prev = g;
  }
}

TEST(GammaN, EqualsExpectationUnderSpectralDensity) {
  for (auto settings : {gaussian_rc(), box_pair()}) {
    const sp::SpectralProfile prof(settings);
    for (int n : {1, 2, 5}) {
      auto g = [&](double w) {
        return std::pow(prof.upsilon_exact(w), n) * geo::spectral_distance_pdf(w, kBand, kAnchor);
      };
      nm::QuadratureSpec spec;
      spec.abs_tol = 1e-22;
      const auto cuts = std::vector<double>{0.0, kW / 2, 2e9, kW, 4e9};
      double expectation = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) expectation += nm::integrate(g, cuts[i], cuts[i + 1], spec);
      EXPECT_NEAR(sp::gamma_n(n, kBand, kAnchor, prof) / (6e9 * expectation), 1.0, 1e-9) << n;
    }
  }
}

TEST(OmegaRule, ReproducesSpectralMoments) {
  for (auto settings : {gaussian_rc(), box_pair()}) {
    const sp::SpectralProfile prof(settings);
    const auto rule = sp::omega_rule(kBand, kAnchor, prof);
    EXPECT_NEAR(std::accumulate(rule.weight.begin(), rule.weight.end(), 0.0), 1.0, 1e-13);
    for (int n : {1, 2, 7}) {
      double sum = 0.0;
      for (std::size_t j = 0; j < rule.weight.size(); ++j) sum += rule.weight[j] * std::pow(rule.upsilon[j], n);
      EXPECT_NEAR(6e9 * sum / sp::gamma_n(n, kBand, kAnchor, prof), 1.0, 1e-9) << n;
    }
  }
}

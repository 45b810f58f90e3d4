#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <memory>
#include <random>

#include "spatspec/geometry.hpp"
#include "spatspec/interference.hpp"
#include "spatspec/numerics.hpp"
#include "spatspec/spectral.hpp"

namespace itf = spatspec::interference;
namespace geo = spatspec::geometry;
namespace sp = spatspec::spectral;
namespace nm = spatspec::numerics;
using spatspec::DomainError;
using spatspec::SeriesDivergence;
using cplx = std::complex<double>;

namespace {

std::shared_ptr<const sp::SpectralProfile> default_profile() {
  static const auto prof = std::make_shared<const sp::SpectralProfile>(sp::SpectralSettings{});
  return prof;
}

itf::InterfererField reference_field() {
  return {geo::Disk{25.0}, geo::ReceiverAnchor{10.0, 62e9}, geo::Band{58e9, 64e9, 2.16e9}, default_profile()};
}

// E[l^-k] on l >= eps by direct quadrature of the distance law.
double pathloss_moment(double k, const itf::InterfererField& f, double eps) {
  auto g = [&](double l) { return std::pow(l, -k) * geo::distance_pdf(l, f.disk, f.anchor); };
  const double knee = f.disk.R - f.anchor.v0_norm, top = f.disk.R + f.anchor.v0_norm;
  const double mass = 1.0 - geo::distance_cdf(eps, f.disk, f.anchor);
  return (nm::integrate(g, eps, knee) + nm::integrate(g, knee, top)) / mass;
}

}  // namespace

TEST(Kappa, ZerothMomentNormalisesDensity) {
  for (double v : {0.0, 10.0}) {
    const double k0 = itf::kappa_n(0, geo::Disk{25.0}, geo::ReceiverAnchor{v, 0.0}, 2.5, 0.0);
    EXPECT_NEAR(2.0 * k0 / (25.0 * 25.0), 1.0, 1e-10) << v;
  }
}

TEST(Kappa, InverseSquareClosedForm) {
  const double R = 30.0;
  EXPECT_NEAR(itf::kappa_n(1, geo::Disk{R}, geo::ReceiverAnchor{0.0, 0.0}, 2.0, 0.1 * R), std::log(10.0), 1e-12);
}

TEST(Kappa, DivergenceGuard) {
  EXPECT_THROW(itf::kappa_n(1, geo::Disk{25.0}, geo::ReceiverAnchor{10.0, 0.0}, 2.5, 0.0), DomainError);
  EXPECT_THROW(itf::kappa_n(1, geo::Disk{25.0}, geo::ReceiverAnchor{10.0, 0.0}, 2.5, 15.0), DomainError);
  EXPECT_NO_THROW(itf::kappa_n(1, geo::Disk{25.0}, geo::ReceiverAnchor{10.0, 0.0}, 1.5, 0.0));
}

TEST(Kappa, MatchesQuadratureOfDistanceLaw) {
  const auto f = reference_field();
  for (int n : {1, 2, 3}) {
    for (double eps : {0.5, 1.0, 3.0}) {
      const double k0 = itf::kappa_n(0, f.disk, f.anchor, 2.5, eps);
      const double kn = itf::kappa_n(n, f.disk, f.anchor, 2.5, eps);
      EXPECT_NEAR(kn / k0 / pathloss_moment(2.5 * n, f, eps), 1.0, 1e-9) << n << " " << eps;
    }
  }
}

TEST(Kappa, LargeOrderStaysFinite) {
  const auto f = reference_field();
  const int n = 60;
  const double eps = 0.5, e = n * 2.5 - 2.0;
  const double log_k = std::log(itf::kappa_n(n, f.disk, f.anchor, 2.5, eps));
  // dominated by the guard-zone edge: eps^(2 - n alpha) / (n alpha - 2)
  EXPECT_NEAR(log_k, -e * std::log(eps) - std::log(e), 1e-10);
}

TEST(DirectMgf, Normalisation) {
  const itf::InterferenceModel model({}, reference_field());
  EXPECT_EQ(model.direct(0.0), cplx(1.0));
  itf::LinkModel silent;
  silent.q = 0.0;
  EXPECT_EQ(itf::InterferenceModel(silent, reference_field()).direct({-3.0, 2.0}), cplx(1.0));
}

TEST(DirectMgf, AgainstSampledPower) {
  const auto f = reference_field();
  const itf::LinkModel link;
  const itf::InterferenceModel model(link, f);
  std::mt19937_64 rng(41);
  std::gamma_distribution<double> fading(link.m, 1.0 / link.m);
  const int n = 1'000'000;
  const double s = -100.0;
  const cplx js(0.0, 300.0);
  double acc = 0.0;
  cplx acc_j = 0.0;
  for (int i = 0; i < n; ++i) {
    geo::Interferer it;
    double l;
    do {
      it = geo::sample_interferer(rng, f.disk, f.band);
      l = norm(f.anchor.position() - it.position);
    } while (l < link.epsilon);
    const double P = link.q * fading(rng) * std::pow(l, -link.alpha) * f.profile->upsilon(it.frequency - f.anchor.f0);
    acc += std::exp(s * P);
    acc_j += std::exp(js * P);
  }
  EXPECT_NEAR(model.direct(s).real() / (acc / n), 1.0, 0.002);
  EXPECT_NEAR(std::abs(model.direct(js) - acc_j / static_cast<double>(n)), 0.0, 0.002);
}

TEST(DirectMgf, RightHalfPlaneGuard) {
  const itf::InterferenceModel model({}, reference_field());
  EXPECT_NO_THROW(model.direct(0.1));
  EXPECT_THROW(model.direct(100.0), DomainError);
  EXPECT_GT(model.direct(0.1).real(), 1.0);
}

TEST(SeriesMgf, ZeroArgument) {
  const itf::InterferenceModel model({}, reference_field(), {itf::MgfMode::series, 50, 1e-10});
  EXPECT_EQ(model.series(0.0).value, 1.0);
}

TEST(SeriesMgf, FirstOrderIdentity) {
  const auto f = reference_field();
  const itf::LinkModel link;
  const double s = -1e-6;
  const auto r = itf::per_interferer_mgf_series(s, link, f, 1, 1e-6);
  EXPECT_EQ(r.terms, 2);
  const double mean_upsilon = sp::gamma_n(1, f.band, f.anchor, *f.profile) / f.band.width();
  const double mean_p = link.q * pathloss_moment(link.alpha, f, link.epsilon) * mean_upsilon;
  EXPECT_NEAR((1.0 - r.value) / -s, mean_p, 1e-6 * mean_p);  // limited by 1 - value cancellation
  const double direct = itf::per_interferer_mgf_direct(s, link, f).real();
  EXPECT_NEAR((1.0 - direct) / -s / mean_p, 1.0, 1e-4);
}

TEST(SeriesMgf, AgreesWithDirectInsideRadius) {
  const itf::LinkModel link;
  const double tol = 1e-10;
  const itf::InterferenceModel direct(link, reference_field(), {itf::MgfMode::direct, 400, tol});
  const itf::InterferenceModel series(link, reference_field(), {itf::MgfMode::series, 400, tol});
  for (double s : {-1e-3, -0.3, -2.0, 0.5}) {
    EXPECT_NEAR(series.per_interferer_mgf(s).real(), direct.per_interferer_mgf(s).real(), 10 * tol) << s;
  }
}

TEST(SeriesMgf, DivergesOutsideRadius) {
  const itf::InterferenceModel model({}, reference_field(), {itf::MgfMode::series, 60, 1e-10});
  EXPECT_THROW(model.series(-50.0), SeriesDivergence);
  EXPECT_THROW(model.per_interferer_mgf({0.0, 1.0}), DomainError);
}

TEST(SeriesMgf, NoGuardZoneIsRejected) {
  itf::LinkModel link;
  link.epsilon = 0.0;
  EXPECT_THROW(itf::per_interferer_mgf_series(-1e-3, link, reference_field()), DomainError);
}

TEST(AggregateMgf, Identities) {
  const itf::InterferenceModel model({}, reference_field());
  EXPECT_EQ(model.aggregate_mgf(0.0, 100, 1.0, 0.3), cplx(1.0));
  EXPECT_EQ(model.aggregate_mgf(-7.0, 100, 1.0, 1.0), cplx(1.0));
  for (cplx s : {cplx(-2.0), cplx(0.0, 40.0)}) {
    const cplx one = model.aggregate_mgf(s, 1, 1.0, 0.0);
    EXPECT_EQ(one, model.per_interferer_mgf(s));
  }
  EXPECT_THROW(itf::aggregate_mgf(10, 1.5, 0.0, 0.9), DomainError);
}

TEST(AggregateMgf, RealAxisShapeAndCharacteristicBound) {
  const itf::InterferenceModel model({}, reference_field());
  double prev = 1.0;
  for (int i = 1; i <= 20; ++i) {
    const double s = -0.5 * i * i;
    const cplx v = model.aggregate_mgf(s, 100, 1.0, 0.2);
    EXPECT_EQ(v.imag(), 0.0);
    EXPECT_GT(v.real(), 0.0);
    EXPECT_LE(v.real(), prev);
    prev = v.real();
  }
  for (int i = 0; i <= 30; ++i) {
    const double t = std::pow(10.0, -1.0 + 0.2 * i);
    EXPECT_LE(std::abs(model.aggregate_mgf({0.0, t}, 100, 1.0, 0.2)), 1.0 + 1e-12) << t;
  }
}

TEST(AggregateMgf, MoreBlockageMeansLessInterference) {
  const itf::InterferenceModel model({}, reference_field());
  for (double s : {-1.0, -10.0, -60.0}) {
    double prev = 0.0;
    for (double pb : {0.0, 0.1, 0.3, 0.6, 0.9, 1.0}) {
      const double v = model.aggregate_mgf(s, 100, 0.8, pb).real();
      EXPECT_GT(v, prev) << s << " " << pb;
      prev = v;
    }
  }
}

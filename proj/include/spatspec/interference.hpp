#pragma once

// Interference statistics. One interferer contributes P = q h l^-alpha Upsilon(omega)
// with h ~ Gamma(m, 1/m), l from the distance law conditioned on l >= epsilon
// (guard zone) and omega from the spectral distance law. The aggregate over N
// slots, each occupied with probability p and unblocked with probability 1 - pb,
// has MGF [1 - p(1 - pb) + p(1 - pb) M_P(s)]^N.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "spatspec/errors.hpp"
#include "spatspec/geometry.hpp"
#include "spatspec/numerics.hpp"
#include "spatspec/spectral.hpp"

namespace spatspec::interference {

using cplx = std::complex<double>;

struct LinkModel {
  double alpha = 2.5;
  double m = 5.0;
  double q = 1.0;        // W
  double epsilon = 1.0;  // m

  void validate() const {
    if (!(alpha > 0)) throw DomainError("LinkModel: alpha must be positive");
    if (!(m >= 0.5)) throw DomainError("LinkModel: m must be >= 0.5");
    if (!(q >= 0) || !std::isfinite(q)) throw DomainError("LinkModel: q must be >= 0");
    if (!(epsilon >= 0)) throw DomainError("LinkModel: epsilon must be >= 0");
  }
};

struct InterfererField {
  geometry::Disk disk;
  geometry::ReceiverAnchor anchor;
  geometry::Band band;
  std::shared_ptr<const spectral::SpectralProfile> profile;

  void validate(const LinkModel& link) const {
    geometry::validate(disk, anchor);
    geometry::validate(band, anchor);
    if (!profile) throw DomainError("InterfererField: missing spectral profile");
    if (!(link.epsilon < disk.R - anchor.v0_norm)) {
      throw DomainError("InterfererField: guard zone must be smaller than R - v0_norm");
    }
  }
};

enum class MgfMode { direct, series };

struct MgfEvaluator {
  MgfMode mode = MgfMode::direct;
  int n_max = 400;
  double tol = 1e-10;

  void validate() const {
    if (n_max < 1) throw DomainError("MgfEvaluator: n_max must be >= 1");
    if (!(tol > 0)) throw DomainError("MgfEvaluator: tol must be positive");
  }
};

namespace detail {

inline numerics::QuadratureSpec distance_spec() {
  numerics::QuadratureSpec spec;
  spec.abs_tol = 1e-300;
  spec.rel_tol = 1e-11;
  return spec;
}

inline double acos_weight(double l, double R, double v) {
  const double arg = (v * v - R * R + l * l) / (2.0 * l * v);
  return std::acos(std::clamp(arg, -1.0, 1.0)) / std::numbers::pi;
}

// kappa_n = eps^(2 - n alpha) * mantissa; returns log(kappa_n).
inline double log_kappa(int n, const geometry::Disk& disk, const geometry::ReceiverAnchor& anchor,
                        double alpha, double eps) {
  const double R = disk.R, v = anchor.v0_norm, knee = R - v;
  const double e = 2.0 - n * alpha;  // exponent after integrating l^(1 - n alpha)
  if (eps == 0 && e <= 0) {
    throw DomainError("kappa_n: guard zone epsilon = 0 makes the pathloss moment diverge for n*alpha >= 2");
  }
  if (!(eps < knee)) throw DomainError("kappa_n: guard zone must be smaller than R - v0_norm");

  if (e > 0) {
    // no scaling needed
    const double first = (std::pow(knee, e) - std::pow(eps, e)) / e;
    double second = 0.0;
    if (v > 0) {
      second = numerics::integrate([&](double l) { return std::pow(l, 1.0 - n * alpha) * acos_weight(l, R, v); },
                                   knee, R + v, distance_spec());
    }
    return std::log(first + second);
  }
  // measure lengths in units of eps so that nothing overflows for large n
  const double ratio = knee / eps;
  const double first = std::abs(e) < 1e-12 ? std::log(ratio) : (std::pow(ratio, e) - 1.0) / e;
  double second = 0.0;
  if (v > 0) {
    second = numerics::integrate(
        [&](double l) { return std::pow(l / eps, 1.0 - n * alpha) * acos_weight(l, R, v) / eps; }, knee, R + v,
        distance_spec());
  }
  return e * std::log(eps) + std::log(first + second);
}

}  // namespace detail

// int_eps^{R - v} l^(1 - n alpha) dl + int_{R - v}^{R + v} l^(1 - n alpha) acos(.) / pi dl.
// 2 kappa_n / R^2 is E[l^-n alpha ; l >= eps] under the distance law.
inline double kappa_n(int n, const geometry::Disk& disk, const geometry::ReceiverAnchor& anchor,
                      double alpha, double eps) {
  if (n < 0) throw DomainError("kappa_n: n must be >= 0");
  geometry::validate(disk, anchor);
  return std::exp(detail::log_kappa(n, disk, anchor, alpha, eps));
}

// Composition of the Binomial generating function with the per-interferer MGF.
inline cplx aggregate_mgf(long N, double p, double pb, cplx per_interferer) {
  if (N < 0) throw DomainError("aggregate_mgf: N must be >= 0");
  if (!(p >= 0 && p <= 1) || !(pb >= 0 && pb <= 1)) throw DomainError("aggregate_mgf: p, pb must be probabilities");
  const double a = p * (1.0 - pb);
  return numerics::ipow(1.0 - a + a * per_interferer, N);
}

struct SeriesResult {
  double value = 1.0;
  double truncation_error = 0.0;
  int terms = 1;
};

// Evaluates the per-interferer MGF for one (link, field) pair. Construction
// fixes the spectral quadrature rule; evaluation is const and thread-safe.
class InterferenceModel {
 public:
  InterferenceModel(const LinkModel& link, const InterfererField& field, const MgfEvaluator& eval = {})
      : link_(link), field_(field), eval_(eval) {
    link_.validate();
    field_.validate(link_);
    eval_.validate();
    rule_ = spectral::omega_rule(field_.band, field_.anchor, *field_.profile);
    upsilon_max_ = 0.0;
    for (double u : rule_.upsilon) upsilon_max_ = std::max(upsilon_max_, u);
    upsilon_max_ = std::max(upsilon_max_, field_.profile->upsilon0());
    mass_ = 1.0 - geometry::distance_cdf(link_.epsilon, field_.disk, field_.anchor);
  }

  const LinkModel& link() const { return link_; }
  const InterfererField& field() const { return field_; }
  const MgfEvaluator& evaluator() const { return eval_; }

  cplx per_interferer_mgf(cplx s) const {
    if (eval_.mode == MgfMode::series) {
      if (s.imag() != 0) throw DomainError("series MGF is defined for real arguments only");
      return series(s.real()).value;
    }
    return direct(s);
  }

  cplx aggregate_mgf(cplx s, long N, double p, double pb) const {
    return interference::aggregate_mgf(N, p, pb, per_interferer_mgf(s));
  }

  // E[(1 - s a / m)^-m], a = q l^-alpha Upsilon(omega), by quadrature over l
  // (adaptive, split at R - v0) of a fixed Gauss rule over omega.
  cplx direct(cplx s) const {
    if (s == 0.0 || link_.q == 0) return 1.0;
    if (s.real() > 0) {
      const double a_max = link_.epsilon > 0 ? link_.q * std::pow(link_.epsilon, -link_.alpha) * upsilon_max_
                                             : std::numeric_limits<double>::infinity();
      if (!(1.0 - s.real() * a_max / link_.m > 0)) {
        throw DomainError("direct MGF: Re(s) too large, 1 - s a / m leaves the right half-plane");
      }
    }
    const double R = field_.disk.R, v = field_.anchor.v0_norm, knee = R - v;
    const cplx k = s * link_.q / link_.m;
    auto over_omega = [&](double l) -> cplx {
      const double pathloss = std::pow(l, -link_.alpha);
      cplx sum = 0.0;
      for (std::size_t j = 0; j < rule_.weight.size(); ++j) {
        sum += rule_.weight[j] * numerics::gamma_mgf_factor(1.0 - k * (pathloss * rule_.upsilon[j]), link_.m);
      }
      return sum * geometry::distance_pdf(l, field_.disk, field_.anchor);
    };
    numerics::QuadratureSpec spec;
    spec.abs_tol = eval_.tol * mass_;
    spec.rel_tol = eval_.tol;
    cplx total = numerics::integrate(over_omega, link_.epsilon, knee, spec);
    if (v > 0) total += numerics::integrate(over_omega, knee, R + v, spec);
    return total / mass_;
  }

  // Power series in s with moments q^n E[h^n] E[l^-n alpha] E[Upsilon^n],
  // summed in log space until the ratio test accepts.
  SeriesResult series(double s) const {
    SeriesResult out;
    if (s == 0 || link_.q == 0) return out;
    const auto& disk = field_.disk;
    const auto& anchor = field_.anchor;
    const double log_k0 = detail::log_kappa(0, disk, anchor, link_.alpha, link_.epsilon);
    const double span = field_.band.width();
    const double m = link_.m;
    double sum = 1.0, prev = 1.0;
    for (int n = 1; n <= eval_.n_max; ++n) {
      const double log_term = n * std::log(link_.q * std::abs(s)) - numerics::lgamma_fn(n + 1.0) - n * std::log(m) +
                              numerics::lgamma_fn(n + m) - numerics::lgamma_fn(m) +
                              std::log(spectral::gamma_n(n, field_.band, anchor, *field_.profile) / span) +
                              detail::log_kappa(n, disk, anchor, link_.alpha, link_.epsilon) - log_k0;
      const double magnitude = std::exp(log_term);
      const double term = (s < 0 && n % 2) ? -magnitude : magnitude;
      sum += term;
      const double ratio = magnitude / prev;
      prev = magnitude;
      if (magnitude <= eval_.tol * std::abs(sum) && (n == 1 || ratio < 1.0)) {
        out.value = sum;
        out.truncation_error = n == 1 ? magnitude : magnitude * ratio / (1.0 - ratio);
        out.terms = n + 1;
        return out;
      }
    }
    throw SeriesDivergence("series MGF: ratio test failed within n_max terms", eval_.n_max);
  }

  // E[P] = q E[l^-alpha] E[Upsilon].
  double mean_power() const {
    const double k1 = detail::log_kappa(1, field_.disk, field_.anchor, link_.alpha, link_.epsilon);
    const double k0 = detail::log_kappa(0, field_.disk, field_.anchor, link_.alpha, link_.epsilon);
    double mean_upsilon = 0.0;
    for (std::size_t j = 0; j < rule_.weight.size(); ++j) mean_upsilon += rule_.weight[j] * rule_.upsilon[j];
    return link_.q * std::exp(k1 - k0) * mean_upsilon;
  }

 private:
  LinkModel link_;
  InterfererField field_;
  MgfEvaluator eval_;
  spectral::OmegaRule rule_;
  double upsilon_max_ = 0.0;
  double mass_ = 1.0;
};

inline cplx per_interferer_mgf_direct(cplx s, const LinkModel& link, const InterfererField& field) {
  return InterferenceModel(link, field).direct(s);
}

inline SeriesResult per_interferer_mgf_series(double s, const LinkModel& link, const InterfererField& field,
                                              int n_max = 400, double tol = 1e-10) {
  return InterferenceModel(link, field, {MgfMode::series, n_max, tol}).series(s);
}

}  // namespace spatspec::interference

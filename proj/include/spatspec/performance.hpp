#pragma once

// Link metrics of the reference pair given the aggregate-interference MGF:
// average BER and outage probability, plus their interference-free closed
// forms. The desired signal has gain g = q0 l0^-alpha and Gamma(m, 1/m) fading.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "spatspec/errors.hpp"
#include "spatspec/numerics.hpp"

namespace spatspec::performance {

using cplx = std::complex<double>;
using AggregateMgf = std::function<cplx(cplx)>;

struct DesiredLink {
  double q0 = 1.0;     // W
  double l0 = 1.0;     // m
  double m = 5.0;
  double noise = 0.1;  // W over the receiver bandwidth
  double c = 1.0;
  double alpha = 2.5;

  double gain() const { return q0 * std::pow(l0, -alpha); }
  double snr() const { return gain() / noise; }

  void validate() const {
    if (!(q0 > 0) || !(l0 > 0) || !(m > 0) || !(noise > 0) || !(c > 0) || !(alpha > 0)) {
      throw DomainError("DesiredLink: q0, l0, m, noise, c and alpha must be positive");
    }
  }
};

struct MetricResult {
  double value = 0.0;
  double error = 0.0;
  bool clamped = false;  // the raw value left its admissible range
};

inline const AggregateMgf kNoInterference = [](cplx) { return cplx(1.0); };

inline numerics::QuadratureSpec metric_spec() {
  numerics::QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-10;
  return spec;
}

// Gil-Pelaez tails decay like u^-m; slow decay (small m) needs many
// subdivisions on the far panels.
inline numerics::QuadratureSpec outage_spec() {
  numerics::QuadratureSpec spec;
  spec.abs_tol = 1e-9;
  spec.rel_tol = 1e-9;
  spec.max_subdivisions = 20000;
  return spec;
}

namespace detail {

inline MetricResult clamp_metric(double raw, double err, double lo, double hi) {
  MetricResult out;
  out.value = std::clamp(raw, lo, hi);
  out.error = err;
  // tiny excursions are quadrature noise around an endpoint, not a failure
  out.clamped = raw < lo - 10 * err - 1e-12 || raw > hi + 10 * err + 1e-12;
  return out;
}

}  // namespace detail

// BER = 1/2 - sqrt(c)/pi * Gamma(m + 1/2)/Gamma(m)
//        * int_0^inf s^-1/2 1F1(m + 1/2; 3/2; -c s) M_I(-m s / g) e^(-m noise s / g) ds,
// integrated in t = sqrt(s).
inline MetricResult average_ber(const DesiredLink& link, const AggregateMgf& mgf,
                                const numerics::QuadratureSpec& spec = metric_spec()) {
  link.validate();
  const double g = link.gain(), m = link.m;
  auto integrand = [&](double t) {
    const double s = t * t;
    const double kernel = numerics::kummer_1f1(m + 0.5, 1.5, -link.c * s);
    if (kernel == 0) return 0.0;  // spares the MGF call once the kernel has underflowed
    return 2.0 * kernel * mgf(cplx(-m * s / g)).real() * std::exp(-m * link.noise * s / g);
  };
  const auto r = numerics::integrate_semiinf_with_error(integrand, 0.0, spec);
  const double k = std::sqrt(link.c) / std::numbers::pi * std::exp(numerics::lgamma_fn(m + 0.5) - numerics::lgamma_fn(m));
  return detail::clamp_metric(0.5 - k * r.value, k * r.abs_error, 0.0, 0.5);
}

// Pr(SINR <= eta) by Gil-Pelaez inversion of X = g h0 - eta (I + noise) at 0.
// With u = g s the characteristic function is
//   (1 - j u / m)^-m M_I(-j eta u / g) e^(-j u eta noise / g).
inline MetricResult outage_probability(double eta, const DesiredLink& link, const AggregateMgf& mgf,
                                       const numerics::QuadratureSpec& spec = outage_spec()) {
  link.validate();
  if (!(eta >= 0)) throw DomainError("outage_probability: threshold must be >= 0");
  if (eta == 0) return {};
  const double g = link.gain(), m = link.m;
  const double phase = eta * link.noise / g;
  auto kernel = [&](double u) {
    const cplx desired = numerics::gamma_mgf_factor(cplx(1.0, -u / m), m);
    const cplx rest = mgf(cplx(0.0, -eta * u / g)) * std::exp(cplx(0.0, -u * phase));
    return (desired * rest).imag();
  };
  const auto r = numerics::integrate_oscillatory_semiinf(kernel, spec, 1.0);
  return detail::clamp_metric(0.5 - r.value / std::numbers::pi, r.abs_error / std::numbers::pi, 0.0, 1.0);
}

// Interference-free oracles.
inline double rayleigh_ber(double snr) { return 0.5 * (1.0 - std::sqrt(snr / (1.0 + snr))); }

inline double outage_without_interference(double eta, const DesiredLink& link) {
  link.validate();
  return numerics::regularized_gamma_p(link.m, link.m * eta / link.snr());
}

}  // namespace spatspec::performance

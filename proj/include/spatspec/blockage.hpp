#pragma once

// Analytic blockage model: single-obstacle blockage, shadow-coverage
// statistics with the two bounds on the number of merged shadows, the mixed
// blockage probability, and the law of the number of active interferers.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>
#include <utility>

#include "spatspec/errors.hpp"
#include "spatspec/geometry.hpp"
#include "spatspec/numerics.hpp"

namespace spatspec::blockage {

// How the single-obstacle and multi-obstacle terms are combined.
//   probability_consistent: w1 = min(1, (E[d]/tan(theta)) / E[l]), w2 = 1 - w1,
//     i.e. the chance that r, uniform on [0, l], falls inside the close range.
//   paper_literal: w1 = tan(theta) / E[d], w2 = 1 / (E[l] - E[d]/tan(theta)),
//     as printed; the sum is clamped to [0, 1].
enum class Mixing { probability_consistent, paper_literal };

struct BlockageParams {
  double rho = 0.0;
  double theta = 10.0 * std::numbers::pi / 180.0;
  double ds = 0.2;
  double de = 0.8;
  double R = 20.0;
  double v0_norm = 10.0;
  Mixing mixing = Mixing::probability_consistent;

  void validate() const {
    if (!(rho >= 0) || !std::isfinite(rho)) throw DomainError("BlockageParams: rho must be >= 0");
    if (!(theta > 0) || !(theta < std::numbers::pi / 2)) {
      throw DomainError("BlockageParams: theta must lie in (0, pi/2)");
    }
    if (!(ds > 0) || !(ds <= de)) throw DomainError("BlockageParams: requires 0 < ds <= de");
    geometry::validate(geometry::Disk{R}, geometry::ReceiverAnchor{v0_norm, 0.0});
  }

  double mean_radius() const { return 0.5 * (ds + de); }
};

struct BusyPeriodStats {
  double mean_busy = 0.0;
  double n_res_lower = 1.0;
  double n_res_upper = 1.0;
};

struct BlockageResult {
  double pb1 = 0.0;
  double pb2_lower = 0.0;  // evaluated at n_res_lower
  double pb2_upper = 0.0;  // evaluated at n_res_upper
  double pb_lower = 0.0;
  double pb_upper = 0.0;
  double mean_shadow = 0.0;
  double mean_busy = 0.0;
  double n_res_lower = 1.0;
  double n_res_upper = 1.0;
  double mean_dist = 0.0;
  double mean_radius = 0.0;
  long shadow_count = 0;  // ceil(kappa)
  double w1 = 0.0;
  double w2 = 0.0;
  bool clamped = false;

  double pb_mid() const { return 0.5 * (pb_lower + pb_upper); }
};

namespace detail {

inline numerics::QuadratureSpec tight_spec() {
  numerics::QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-10;
  return spec;
}

// Integral of g(l) f_L(l) over [lo, R + v0], split at the branch point R - v0.
template <class G>
double against_distance_law(G&& g, double lo, const BlockageParams& p,
                            const numerics::QuadratureSpec& spec = tight_spec()) {
  const geometry::Disk disk{p.R};
  const geometry::ReceiverAnchor anchor{p.v0_norm, 0.0};
  auto f = [&](double l) { return g(l) * geometry::distance_pdf(l, disk, anchor); };
  const double knee = p.R - p.v0_norm, top = p.R + p.v0_norm;
  if (lo >= top) return 0.0;
  if (lo >= knee || knee == top) return numerics::integrate(f, lo, top, spec);
  return numerics::integrate(f, lo, knee, spec) + numerics::integrate(f, knee, top, spec);
}

}  // namespace detail

inline double mean_distance(const BlockageParams& params) {
  params.validate();
  return detail::against_distance_law([](double l) { return l; }, 0.0, params);
}

inline double pb1(const BlockageParams& params) {
  params.validate();
  const double rho = params.rho, t = std::tan(params.theta);
  if (rho == 0) return 0.0;
  if (params.ds == params.de) return -std::expm1(-rho * params.ds * params.ds / t);
  const double k = std::sqrt(rho / t);
  const double spread = numerics::erf(params.de * k) - numerics::erf(params.ds * k);
  const double v = 1.0 - std::sqrt(std::numbers::pi * t / rho) / (2.0 * (params.de - params.ds)) * spread;
  return std::clamp(v, 0.0, 1.0);
}

// Expected shadow length E[2 d l / r] with d uniform on [ds, de], l from the
// distance law and r | l uniform on [0, l], restricted to r >= d / tan(theta).
// Evaluated as a nested quadrature over (d, l, r).
inline double mean_shadow(const BlockageParams& params) {
  params.validate();
  const double t = std::tan(params.theta);
  auto given_d = [&](double d) {
    const double r_min = d / t;
    auto given_l = [&](double l) {
      if (l <= r_min) return 0.0;
      return numerics::integrate([&](double r) { return 2.0 * d / r; }, r_min, l, detail::tight_spec());
    };
    return detail::against_distance_law(given_l, r_min, params);
  };
  if (params.ds == params.de) return given_d(params.ds);
  return numerics::integrate(given_d, params.ds, params.de, detail::tight_spec()) /
         (params.de - params.ds);
}

inline BusyPeriodStats busy_period_stats(double rho, double mean_shadow_len, double mean_dist,
                                         double theta) {
  BusyPeriodStats out;
  const double x = rho * mean_shadow_len;
  out.mean_busy = rho == 0 ? mean_shadow_len : std::expm1(x) / rho;
  out.n_res_upper = 1.0 + 2.0 * rho * mean_dist * std::tan(theta);
  out.n_res_lower = std::exp(-x) * out.n_res_upper;
  return out;
}

inline BusyPeriodStats busy_period_stats(const BlockageParams& params) {
  return busy_period_stats(params.rho, mean_shadow(params), mean_distance(params), params.theta);
}

// ceil of the cone base length over the mean busy-period length.
inline long shadow_count(double mean_dist, double theta, double mean_busy) {
  if (!(mean_busy > 0)) throw DomainError("pb2: mean busy period is zero");
  return static_cast<long>(std::ceil(2.0 * mean_dist * std::tan(theta) / mean_busy));
}

inline double poisson_pmf(long k, double mean) {
  if (k < 0) return 0.0;
  if (mean == 0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(mean) - mean - numerics::lgamma_fn(k + 1.0));
}

inline double pb2(const BlockageParams& params, double n_res) {
  if (!(n_res > 0)) throw DomainError("pb2: n_res must be positive");
  params.validate();
  const double dist = mean_distance(params);
  const auto stats = busy_period_stats(params.rho, mean_shadow(params), dist, params.theta);
  return poisson_pmf(shadow_count(dist, params.theta, stats.mean_busy), n_res);
}

// Mixing weights for the configured convention. Throws when the mean link is
// no longer than the close range E[d] / tan(theta).
inline std::pair<double, double> mixing_weights(const BlockageParams& params, double mean_dist) {
  const double close = params.mean_radius() / std::tan(params.theta);
  if (!(mean_dist > close)) {
    throw DomainError("pb: mean link length must exceed E[d]/tan(theta)");
  }
  if (params.mixing == Mixing::paper_literal) return {1.0 / close, 1.0 / (mean_dist - close)};
  const double w1 = std::min(1.0, close / mean_dist);
  return {w1, 1.0 - w1};
}

// Geometry-only part of the model; independent of rho, so sweeps over rho can
// reuse it.
struct BlockageGeometry {
  double mean_dist = 0.0;
  double mean_shadow = 0.0;
};

inline BlockageGeometry blockage_geometry(const BlockageParams& params) {
  return {mean_distance(params), mean_shadow(params)};
}

inline BlockageResult pb(const BlockageParams& params, const BlockageGeometry& geom) {
  params.validate();
  BlockageResult out;
  out.mean_dist = geom.mean_dist;
  out.mean_shadow = geom.mean_shadow;
  out.mean_radius = params.mean_radius();
  std::tie(out.w1, out.w2) = mixing_weights(params, geom.mean_dist);

  const auto stats = busy_period_stats(params.rho, geom.mean_shadow, geom.mean_dist, params.theta);
  out.mean_busy = stats.mean_busy;
  out.n_res_lower = stats.n_res_lower;
  out.n_res_upper = stats.n_res_upper;
  out.shadow_count = shadow_count(geom.mean_dist, params.theta, stats.mean_busy);
  if (params.rho == 0) return out;  // no obstacles: every term vanishes

  out.pb1 = pb1(params);
  out.pb2_lower = poisson_pmf(out.shadow_count, stats.n_res_lower);
  out.pb2_upper = poisson_pmf(out.shadow_count, stats.n_res_upper);
  auto mix = [&](double p2) {
    const double v = out.w1 * out.pb1 + out.w2 * p2;
    if (v < 0.0 || v > 1.0) out.clamped = true;
    return std::clamp(v, 0.0, 1.0);
  };
  const double a = mix(out.pb2_lower), b = mix(out.pb2_upper);
  out.pb_lower = std::min(a, b);
  out.pb_upper = std::max(a, b);
  return out;
}

inline BlockageResult pb(const BlockageParams& params) {
  return pb(params, blockage_geometry(params));
}

namespace detail {

inline void check_thinning(double p, double pb) {
  if (!(p >= 0 && p <= 1) || !(pb >= 0 && pb <= 1)) {
    throw DomainError("active count: p and pb must be probabilities");
  }
}

}  // namespace detail

// Generating function of the number of active (placed, unblocked) interferers.
inline double active_count_pgf(double z, long N, double p, double pb) {
  detail::check_thinning(p, pb);
  if (N < 0) throw DomainError("active_count_pgf: N must be >= 0");
  const double q = p * (1.0 - pb);
  return std::pow(1.0 - q + q * z, static_cast<double>(N));
}

inline double active_count_pmf(long k, long N, double p, double pb) {
  detail::check_thinning(p, pb);
  if (N < 0) throw DomainError("active_count_pmf: N must be >= 0");
  if (k < 0 || k > N) return 0.0;
  const double q = p * (1.0 - pb);
  if (q == 0) return k == 0 ? 1.0 : 0.0;
  if (q == 1) return k == N ? 1.0 : 0.0;
  const double log_choose = numerics::lgamma_fn(N + 1.0) - numerics::lgamma_fn(k + 1.0) -
                            numerics::lgamma_fn(N - k + 1.0);
  return std::exp(log_choose + k * std::log(q) + (N - k) * std::log1p(-q));
}

}  // namespace spatspec::blockage

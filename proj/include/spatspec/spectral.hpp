#pragma once

// Spectral overlap between an interferer's PSD, offset by omega from the
// receiver carrier, and the receiver filter:
//   Upsilon(omega) = int_{-W/2}^{W/2} Phi(f - omega) |H(f)|^2 df.
// Phi has unit power and |H(0)|^2 = 1, so Upsilon(0) <= 1.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "spatspec/errors.hpp"
#include "spatspec/geometry.hpp"
#include "spatspec/numerics.hpp"

namespace spatspec::spectral {

enum class PsdShape { gaussian, rectangular };
enum class FilterShape { raised_cosine, ideal };

struct SpectralSettings {
  PsdShape psd_shape = PsdShape::gaussian;
  double psd_bandwidth = 0.0;  // 0 means W; a Gaussian PSD uses sigma = bandwidth / 4
  FilterShape filter_shape = FilterShape::raised_cosine;
  double rolloff = 0.25;
  double W = 2.16e9;
  double normalization = 1.0;  // total PSD power
  double grid_tol = 1e-6;      // interpolation error budget, relative to Upsilon(0)

  double bandwidth() const { return psd_bandwidth > 0 ? psd_bandwidth : W; }

  void validate() const {
    if (!(W > 0) || !std::isfinite(W)) throw DomainError("SpectralSettings: W must be positive");
    if (!(psd_bandwidth >= 0)) throw DomainError("SpectralSettings: psd_bandwidth must be >= 0");
    if (!(rolloff >= 0 && rolloff <= 1)) throw DomainError("SpectralSettings: rolloff must lie in [0, 1]");
    if (!(normalization > 0)) throw DomainError("SpectralSettings: normalization must be positive");
    if (!(grid_tol > 0)) throw DomainError("SpectralSettings: grid_tol must be positive");
  }
};

class SpectralProfile {
 public:
  explicit SpectralProfile(const SpectralSettings& settings) : s_(settings) {
    s_.validate();
    const double half = 0.5 * s_.W;
    if (s_.filter_shape == FilterShape::raised_cosine && s_.rolloff > 0) {
      flat_edge_ = (1.0 - s_.rolloff) * s_.W / (2.0 * (1.0 + s_.rolloff));
    } else {
      flat_edge_ = half;
    }
    sigma_ = s_.bandwidth() / 4.0;
    grid_top_ = s_.psd_shape == PsdShape::gaussian ? half + 10.0 * sigma_ : half + 0.5 * s_.bandwidth();
    upsilon0_ = upsilon_exact(0.0);
    build_grid();
  }

  const SpectralSettings& settings() const { return s_; }

  double psd(double f) const {
    if (s_.psd_shape == PsdShape::gaussian) {
      const double z = f / sigma_;
      return s_.normalization * std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
    }
    const double B = s_.bandwidth();
    return std::abs(f) <= 0.5 * B ? s_.normalization / B : 0.0;
  }

  // |H(f)|^2: flat up to flat_edge, cosine roll-off to zero at W/2.
  double filter_gain(double f) const {
    const double a = std::abs(f), half = 0.5 * s_.W;
    if (a > half) return 0.0;
    if (a <= flat_edge_) return 1.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (a - flat_edge_) / (half - flat_edge_)));
  }

  double upsilon_exact(double omega) const {
    omega = std::abs(omega);
    const double half = 0.5 * s_.W;
    std::vector<double> cuts{-half, half};
    if (flat_edge_ < half) {
      cuts.push_back(-flat_edge_);
      cuts.push_back(flat_edge_);
    }
    if (s_.psd_shape == PsdShape::rectangular) {
      const double B = s_.bandwidth();
      if (omega - 0.5 * B >= half || omega + 0.5 * B <= -half) return 0.0;
      cuts.push_back(omega - 0.5 * B);
      cuts.push_back(omega + 0.5 * B);
    }
    std::sort(cuts.begin(), cuts.end());
    numerics::QuadratureSpec spec;
    spec.abs_tol = 1e-15 * s_.normalization;
    spec.rel_tol = 1e-12;
    auto f = [&](double x) { return psd(x - omega) * filter_gain(x); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = std::max(cuts[i], -half), b = std::min(cuts[i + 1], half);
      if (a < b) total += numerics::integrate(f, a, b, spec);
    }
    return total;
  }

  // Cached evaluation: linear interpolation on a uniform grid whose midpoint
  // error was checked against the exact value when the profile was built.
  double upsilon(double omega) const {
    omega = std::abs(omega);
    if (omega >= grid_top_) {
      return s_.psd_shape == PsdShape::gaussian ? upsilon_exact(omega) : 0.0;
    }
    const double x = omega / step_;
    const auto i = std::min(static_cast<std::size_t>(x), grid_.size() - 2);
    const double frac = x - static_cast<double>(i);
    return grid_[i] + frac * (grid_[i + 1] - grid_[i]);
  }

  double upsilon0() const { return upsilon0_; }
  std::size_t grid_points() const { return grid_.size(); }
  double grid_error() const { return grid_error_; }

  // Offsets where Upsilon is not smooth (none for the Gaussian PSD).
  std::vector<double> kinks() const {
    std::vector<double> out;
    if (s_.psd_shape != PsdShape::rectangular) return out;
    const double B2 = 0.5 * s_.bandwidth(), half = 0.5 * s_.W;
    for (double edge : {half, flat_edge_}) {
      out.push_back(std::abs(edge - B2));
      out.push_back(edge + B2);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  void build_grid() {
    std::size_t cells = 64;
    grid_.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) grid_[i] = upsilon_exact(grid_top_ * i / cells);
    const double budget = s_.grid_tol * upsilon0_;
    for (;;) {
      std::vector<double> mids(cells);
      grid_error_ = 0.0;
      for (std::size_t i = 0; i < cells; ++i) {
        mids[i] = upsilon_exact(grid_top_ * (i + 0.5) / cells);
        grid_error_ = std::max(grid_error_, std::abs(mids[i] - 0.5 * (grid_[i] + grid_[i + 1])));
      }
      if (grid_error_ <= budget) break;
      if (cells >= (std::size_t{1} << 20)) {
        throw NonConvergence("SpectralProfile: interpolation grid did not meet its tolerance", grid_error_);
      }
      std::vector<double> finer(2 * cells + 1);
      for (std::size_t i = 0; i < cells; ++i) {
        finer[2 * i] = grid_[i];
        finer[2 * i + 1] = mids[i];
      }
      finer[2 * cells] = grid_[cells];
      grid_ = std::move(finer);
      cells *= 2;
    }
    step_ = grid_top_ / cells;
  }

  SpectralSettings s_;
  double flat_edge_ = 0.0;
  double sigma_ = 0.0;
  double grid_top_ = 0.0;
  double step_ = 0.0;
  double upsilon0_ = 0.0;
  double grid_error_ = 0.0;
  std::vector<double> grid_;
};

inline double upsilon(double omega, const SpectralProfile& profile) { return profile.upsilon(omega); }

namespace detail {

// Breakpoints of [0, top] at the profile's kinks.
inline std::vector<double> split_points(double top, const SpectralProfile& profile) {
  std::vector<double> cuts{0.0, top};
  for (double k : profile.kinks()) {
    if (k > 0 && k < top) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

inline double power_integral(int n, double top, const SpectralProfile& profile) {
  numerics::QuadratureSpec spec;
  spec.abs_tol = 1e-300;  // relative accuracy only: high powers get very small
  spec.rel_tol = 1e-11;
  const auto cuts = split_points(top, profile);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += numerics::integrate([&](double w) { return std::pow(profile.upsilon_exact(w), n); },
                                 cuts[i], cuts[i + 1], spec);
  }
  return total;
}

}  // namespace detail

// int_0^{near} Upsilon^n + int_0^{far} Upsilon^n, with near/far the smaller
// and larger distance from f0 to the band edges.
inline double gamma_n(int n, const geometry::Band& band, const geometry::ReceiverAnchor& anchor,
                      const SpectralProfile& profile) {
  if (n < 0) throw DomainError("gamma_n: n must be >= 0");
  const auto reach = geometry::spectral_reach(band, anchor);
  if (n == 0) return reach.near + reach.far;
  const double near = detail::power_integral(n, reach.near, profile);
  if (reach.far == reach.near) return 2.0 * near;
  return near + detail::power_integral(n, reach.far, profile);
}

// Fixed quadrature rule for expectations over the spectral distance:
// E[g(Upsilon(omega))] ~= sum_j weight_j g(upsilon_j). Weights include the
// density of |f - f0| and sum to one. Panels break at the band-edge distance
// and at the profile's kinks, and are no wider than `max_panel`.
struct OmegaRule {
  std::vector<double> omega;
  std::vector<double> weight;
  std::vector<double> upsilon;
};

inline OmegaRule omega_rule(const geometry::Band& band, const geometry::ReceiverAnchor& anchor,
                            const SpectralProfile& profile, int nodes_per_panel = 16,
                            double max_panel = 0.0) {
  const auto reach = geometry::spectral_reach(band, anchor);
  if (max_panel <= 0) max_panel = profile.settings().bandwidth() / 8.0;
  auto cuts = detail::split_points(reach.far, profile);
  if (reach.near > 0 && reach.near < reach.far) cuts.push_back(reach.near);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto gl = numerics::gauss_legendre(nodes_per_panel);
  OmegaRule rule;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * h, mid = lo + 0.5 * h;
      const double density = geometry::spectral_distance_pdf(mid, band, anchor);
      for (int j = 0; j < nodes_per_panel; ++j) {
        const double w = mid + 0.5 * h * gl.nodes[j];
        rule.omega.push_back(w);
        rule.weight.push_back(0.5 * h * gl.weights[j] * density);
        rule.upsilon.push_back(profile.upsilon_exact(w));
      }
    }
  }
  return rule;
}

}  // namespace spatspec::spectral

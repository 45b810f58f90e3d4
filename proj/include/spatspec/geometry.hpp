#pragma once

// Spatial and spectral distance laws, cone-shadow geometry, and the point
// process samplers. The reference receiver sits at (v0_norm, 0) inside a disk
// of radius R centred at the origin.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "spatspec/errors.hpp"

namespace spatspec::geometry {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
  friend double norm(Vec2 a) { return std::hypot(a.x, a.y); }
  friend bool operator==(Vec2, Vec2) = default;
};

struct Disk {
  double R = 1.0;

  void validate() const {
    if (!(R > 0) || !std::isfinite(R)) throw DomainError("Disk: radius must be positive");
  }
};

struct ReceiverAnchor {
  double v0_norm = 0.0;
  double f0 = 0.0;

  Vec2 position() const { return {v0_norm, 0.0}; }
};

struct Band {
  double fs = 0.0;
  double fe = 1.0;
  double W = 1.0;

  double width() const { return fe - fs; }

  void validate() const {
    if (!(fs < fe)) throw DomainError("Band: requires fs < fe");
    if (!(W > 0) || W > fe - fs) throw DomainError("Band: requires 0 < W <= fe - fs");
  }
};

struct ObstacleCircle {
  Vec2 center;
  double d = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Interferer {
  Vec2 position;
  double frequency = 0.0;
};

inline void validate(const Disk& disk, const ReceiverAnchor& anchor) {
  disk.validate();
  if (!(anchor.v0_norm >= 0) || !(anchor.v0_norm < disk.R)) {
    throw DomainError("ReceiverAnchor: requires 0 <= v0_norm < R");
  }
}

inline void validate(const Band& band, const ReceiverAnchor& anchor) {
  band.validate();
  if (anchor.f0 < band.fs || anchor.f0 > band.fe) {
    throw DomainError("ReceiverAnchor: requires fs <= f0 <= fe");
  }
}

namespace detail {

inline constexpr double kAcosSlack = 1e-12;

inline double checked_acos(double x) {
  if (std::abs(x) > 1.0 + kAcosSlack) throw DomainError("distance law: arccos argument out of range");
  return std::acos(std::clamp(x, -1.0, 1.0));
}

}  // namespace detail

// Density of the distance between the receiver and a point uniform on the disk.
inline double distance_pdf(double l, const Disk& disk, const ReceiverAnchor& anchor) {
  validate(disk, anchor);
  const double R = disk.R, v = anchor.v0_norm;
  if (!(l > 0) || l > R + v) return 0.0;
  if (l <= R - v) return 2.0 * l / (R * R);
  const double arg = (v * v - R * R + l * l) / (2.0 * l * v);
  return 2.0 * l * detail::checked_acos(arg) / (std::numbers::pi * R * R);
}

// CDF of the same law: the area of the lens {|x - v0| <= l} inside the disk,
// over the disk area.
inline double distance_cdf(double l, const Disk& disk, const ReceiverAnchor& anchor) {
  validate(disk, anchor);
  const double R = disk.R, v = anchor.v0_norm;
  if (!(l > 0)) return 0.0;
  if (l <= R - v) return (l * l) / (R * R);
  if (l >= R + v) return 1.0;
  const double a1 = detail::checked_acos((v * v + l * l - R * R) / (2.0 * v * l));
  const double a2 = detail::checked_acos((v * v + R * R - l * l) / (2.0 * v * R));
  const double k = (-v + l + R) * (v + l - R) * (v - l + R) * (v + l + R);
  const double area = l * l * a1 + R * R * a2 - 0.5 * std::sqrt(std::max(k, 0.0));
  return std::clamp(area / (std::numbers::pi * R * R), 0.0, 1.0);
}

// Smaller and larger of |fe - f0| and |fs - f0|.
struct SpectralReach {
  double near = 0.0;
  double far = 0.0;
};

inline SpectralReach spectral_reach(const Band& band, const ReceiverAnchor& anchor) {
  validate(band, anchor);
  const double we = std::abs(band.fe - anchor.f0), ws = std::abs(band.fs - anchor.f0);
  return {std::min(we, ws), std::max(we, ws)};
}

// Density of |f - f0| for f uniform on [fs, fe].
inline double spectral_distance_pdf(double w, const Band& band, const ReceiverAnchor& anchor) {
  const auto reach = spectral_reach(band, anchor);
  const double span = band.width();
  if (!(w > 0) || w > reach.far) return 0.0;
  return w <= reach.near ? 2.0 / span : 1.0 / span;
}

inline double spectral_distance_cdf(double w, const Band& band, const ReceiverAnchor& anchor) {
  const auto reach = spectral_reach(band, anchor);
  const double span = band.width();
  if (!(w > 0)) return 0.0;
  if (w >= reach.far) return 1.0;
  if (w <= reach.near) return 2.0 * w / span;
  return (w + reach.near) / span;
}

template <class Rng>
Vec2 sample_uniform_disk(Rng& rng, const Disk& disk) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double r = disk.R * std::sqrt(u01(rng));
  const double phi = 2.0 * std::numbers::pi * u01(rng);
  return {r * std::cos(phi), r * std::sin(phi)};
}

template <class Rng>
Interferer sample_interferer(Rng& rng, const Disk& disk, const Band& band) {
  disk.validate();
  band.validate();
  Interferer out;
  out.position = sample_uniform_disk(rng, disk);
  out.frequency = std::uniform_real_distribution<double>(band.fs, band.fe)(rng);
  return out;
}

template <class Rng>
std::vector<ObstacleCircle> sample_obstacles(Rng& rng, const Disk& disk, double rho, double ds, double de) {
  disk.validate();
  if (!(rho >= 0)) throw DomainError("sample_obstacles: density must be non-negative");
  if (!(ds > 0) || !(ds <= de)) throw DomainError("sample_obstacles: requires 0 < ds <= de");
  std::vector<ObstacleCircle> out;
  if (rho == 0) return out;
  const double mean = rho * std::numbers::pi * disk.R * disk.R;
  const auto count = std::poisson_distribution<long>(mean)(rng);
  out.reserve(static_cast<std::size_t>(count));
  std::uniform_real_distribution<double> radius(ds, de);
  for (long i = 0; i < count; ++i) {
    ObstacleCircle c;
    c.center = sample_uniform_disk(rng, disk);
    c.d = ds == de ? ds : radius(rng);
    out.push_back(c);
  }
  return out;
}

// Shadows cast on the base of the cone with apex at `ap`, axis towards `rx`
// and half-angle theta. Base coordinates run over [-L, L], L = |rx - ap| tan(theta).
// An obstacle at axial distance r with lateral offset y projects to the centre
// y l / r with half-length d l / r.
inline std::vector<Interval> cone_shadow_intervals(Vec2 ap, Vec2 rx, double theta,
                                                   const std::vector<ObstacleCircle>& obstacles) {
  if (!(theta > 0) || !(theta < std::numbers::pi / 2)) {
    throw DomainError("cone_shadow_intervals: theta must lie in (0, pi/2)");
  }
  const Vec2 axis = rx - ap;
  const double l = norm(axis);
  if (!(l > 0)) throw DomainError("cone_shadow_intervals: apex and receiver coincide");
  const Vec2 u = (1.0 / l) * axis;
  const Vec2 n{-u.y, u.x};
  const double L = l * std::tan(theta);

  std::vector<Interval> out;
  for (const auto& ob : obstacles) {
    const Vec2 rel = ob.center - ap;
    const double r = dot(rel, u);
    if (!(r > 0) || !(r < l)) continue;
    const double centre = dot(rel, n) * l / r;
    const double half = ob.d * l / r;
    const double lo = std::max(centre - half, -L), hi = std::min(centre + half, L);
    if (lo < hi) out.push_back({lo, hi});
  }
  return out;
}

// True iff the union of the intervals covers [-L, L].
inline bool is_link_blocked(std::vector<Interval> intervals, double base_half_length) {
  if (intervals.empty()) return false;
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double reach = -base_half_length;
  for (const auto& iv : intervals) {
    if (iv.lo > reach) return false;
    reach = std::max(reach, iv.hi);
    if (reach >= base_half_length) return true;
  }
  return false;
}

}  // namespace spatspec::geometry

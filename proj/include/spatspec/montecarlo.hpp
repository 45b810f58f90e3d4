#pragma once

// Geometric Monte-Carlo oracle. Every trial draws from its own generator,
// seeded from (seed, stream, trial index), and results are stored by index and
// reduced in index order, so estimates do not depend on the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "spatspec/blockage.hpp"
#include "spatspec/errors.hpp"
#include "spatspec/geometry.hpp"
#include "spatspec/interference.hpp"
#include "spatspec/numerics.hpp"
#include "spatspec/performance.hpp"
#include "spatspec/spectral.hpp"

namespace spatspec::montecarlo {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n_trials)
  long n_trials = 0;
};

inline McEstimate estimate(const std::vector<double>& xs) {
  if (xs.empty()) throw DomainError("estimate: no samples");
  McEstimate out;
  out.n_trials = static_cast<long>(xs.size());
  const double n = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent named streams per purpose.
enum Stream : std::uint64_t { kScenarioStream = 1, kDesiredFadingStream = 2, kBlockageStream = 3 };

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ splitmix64(stream)) + index));
}

// Runs body(i) for i in [0, n) on `threads` workers (contiguous blocks).
// The first exception thrown by any worker is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  if (threads < 1) throw DomainError("parallel_for: threads must be >= 1");
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Link from `ap` to `rx` blocked by the obstacle set?
inline bool link_blocked(geometry::Vec2 ap, geometry::Vec2 rx, double theta,
                         const std::vector<geometry::ObstacleCircle>& obstacles) {
  if (obstacles.empty()) return false;
  const double L = norm(rx - ap) * std::tan(theta);
  return geometry::is_link_blocked(geometry::cone_shadow_intervals(ap, rx, theta, obstacles), L);
}

// Blocked fraction of single links: one uniform interferer and a fresh
// obstacle field per trial.
inline McEstimate run_blockage_mc(const blockage::BlockageParams& params, long n_trials, std::uint64_t seed,
                                  int threads = 1) {
  params.validate();
  if (n_trials < 1) throw DomainError("run_blockage_mc: n_trials must be >= 1");
  const geometry::Disk disk{params.R};
  const geometry::Vec2 rx{params.v0_norm, 0.0};
  std::vector<double> blocked(static_cast<std::size_t>(n_trials), 0.0);
  parallel_for(blocked.size(), threads, [&](std::size_t i) {
    auto rng = trial_rng(seed, kBlockageStream, i);
    geometry::Vec2 ap;
    do {
      ap = geometry::sample_uniform_disk(rng, disk);
    } while (ap == rx);
    const auto obstacles = geometry::sample_obstacles(rng, disk, params.rho, params.ds, params.de);
    blocked[i] = link_blocked(ap, rx, params.theta, obstacles) ? 1.0 : 0.0;
  });
  return estimate(blocked);
}

struct ScenarioConfig {
  long N = 100;
  double p = 1.0;
  geometry::Disk disk{25.0};
  geometry::ReceiverAnchor anchor{10.0, 62e9};
  geometry::Band band{58e9, 64e9, 2.16e9};
  double rho = 0.0;
  double theta = 10.0 * std::numbers::pi / 180.0;
  double ds = 0.2;
  double de = 0.8;
  interference::LinkModel link;
  std::shared_ptr<const spectral::SpectralProfile> profile;
  // false: every link sees its own obstacle field, which removes the
  // correlation between links that share obstacles
  bool shared_obstacles = true;

  void validate() const {
    if (N < 0) throw DomainError("ScenarioConfig: N must be >= 0");
    if (!(p >= 0 && p <= 1)) throw DomainError("ScenarioConfig: p must be a probability");
    blockage::BlockageParams{rho, theta, ds, de, disk.R, anchor.v0_norm}.validate();
    link.validate();
    interference::InterfererField{disk, anchor, band, profile}.validate(link);
  }
};

// One sampled realisation.
struct McScenario {
  std::vector<geometry::Interferer> interferers;
  std::vector<geometry::ObstacleCircle> obstacles;
  std::vector<double> fading;
  std::vector<char> blocked;
  double i_agg = 0.0;

  long active() const { return static_cast<long>(std::count(blocked.begin(), blocked.end(), 0)); }
};

template <class Rng>
McScenario sample_scenario(Rng& rng, const ScenarioConfig& cfg) {
  McScenario sc;
  const geometry::Vec2 rx = cfg.anchor.position();
  std::bernoulli_distribution present(cfg.p);
  for (long slot = 0; slot < cfg.N; ++slot) {
    if (!present(rng)) continue;
    geometry::Interferer it;
    do {
      it = geometry::sample_interferer(rng, cfg.disk, cfg.band);
    } while (norm(rx - it.position) < cfg.link.epsilon || it.position == rx);
    sc.interferers.push_back(it);
  }
  if (cfg.shared_obstacles) sc.obstacles = geometry::sample_obstacles(rng, cfg.disk, cfg.rho, cfg.ds, cfg.de);
  std::gamma_distribution<double> fading(cfg.link.m, 1.0 / cfg.link.m);
  for (const auto& it : sc.interferers) {
    const double h = fading(rng);
    const bool blocked =
        cfg.shared_obstacles
            ? link_blocked(it.position, rx, cfg.theta, sc.obstacles)
            : link_blocked(it.position, rx, cfg.theta, geometry::sample_obstacles(rng, cfg.disk, cfg.rho, cfg.ds, cfg.de));
    sc.fading.push_back(h);
    sc.blocked.push_back(blocked ? 1 : 0);
    if (blocked) continue;
    const double l = norm(rx - it.position);
    sc.i_agg += cfg.link.q * h * std::pow(l, -cfg.link.alpha) * cfg.profile->upsilon(it.frequency - cfg.anchor.f0);
  }
  return sc;
}

struct TrialRecord {
  long placed = 0;
  long active = 0;
  double i_agg = 0.0;
};

struct ScenarioSamples {
  long N = 0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> trials;

  // Blocked fraction over all placed links.
  double pb_mc() const {
    long placed = 0, active = 0;
    for (const auto& t : trials) {
      placed += t.placed;
      active += t.active;
    }
    return placed == 0 ? 0.0 : static_cast<double>(placed - active) / static_cast<double>(placed);
  }

  std::vector<double> k_pmf() const {
    std::vector<double> pmf(static_cast<std::size_t>(N) + 1, 0.0);
    for (const auto& t : trials) pmf[static_cast<std::size_t>(t.active)] += 1.0;
    for (double& v : pmf) v /= static_cast<double>(trials.size());
    return pmf;
  }

  std::vector<double> i_agg() const {
    std::vector<double> out;
    out.reserve(trials.size());
    for (const auto& t : trials) out.push_back(t.i_agg);
    return out;
  }

  McEstimate mean_active() const {
    std::vector<double> k;
    k.reserve(trials.size());
    for (const auto& t : trials) k.push_back(static_cast<double>(t.active));
    return estimate(k);
  }
};

inline ScenarioSamples run_scenario_mc(const ScenarioConfig& cfg, long n_trials, std::uint64_t seed,
                                       int threads = 1) {
  cfg.validate();
  if (n_trials < 1) throw DomainError("run_scenario_mc: n_trials must be >= 1");
  ScenarioSamples out;
  out.N = cfg.N;
  out.seed = seed;
  out.trials.resize(static_cast<std::size_t>(n_trials));
  parallel_for(out.trials.size(), threads, [&](std::size_t i) {
    auto rng = trial_rng(seed, kScenarioStream, i);
    const auto sc = sample_scenario(rng, cfg);
    out.trials[i] = {static_cast<long>(sc.interferers.size()), sc.active(), sc.i_agg};
  });
  return out;
}

// Reference-link fading draws, one per trial, from their own stream so they
// can be reused across thresholds and SNR points.
inline std::vector<double> desired_fading(std::size_t n, double m, std::uint64_t seed) {
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = trial_rng(seed, kDesiredFadingStream, i);
    h[i] = std::gamma_distribution<double>(m, 1.0 / m)(rng);
  }
  return h;
}

inline McEstimate empirical_mgf(const std::vector<double>& i_agg, double s) {
  std::vector<double> v(i_agg.size());
  std::transform(i_agg.begin(), i_agg.end(), v.begin(), [s](double x) { return std::exp(s * x); });
  return estimate(v);
}

inline McEstimate empirical_outage(const std::vector<double>& i_agg, const std::vector<double>& h0,
                                   const performance::DesiredLink& link, double eta) {
  if (h0.size() != i_agg.size()) throw DomainError("empirical_outage: one fading draw per trial required");
  std::vector<double> v(i_agg.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = link.gain() * h0[i] / (i_agg[i] + link.noise) <= eta ? 1.0 : 0.0;
  }
  return estimate(v);
}

inline McEstimate empirical_outage(const std::vector<double>& i_agg, const performance::DesiredLink& link, double eta,
                                   std::uint64_t seed) {
  return empirical_outage(i_agg, desired_fading(i_agg.size(), link.m, seed), link, eta);
}

// Mean of Q(sqrt(2 c SINR)).
inline McEstimate empirical_ber(const std::vector<double>& i_agg, const std::vector<double>& h0,
                                const performance::DesiredLink& link) {
  if (h0.size() != i_agg.size()) throw DomainError("empirical_ber: one fading draw per trial required");
  std::vector<double> v(i_agg.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double sinr = link.gain() * h0[i] / (i_agg[i] + link.noise);
    v[i] = numerics::q_function(std::sqrt(2.0 * link.c * sinr));
  }
  return estimate(v);
}

inline McEstimate empirical_ber(const std::vector<double>& i_agg, const performance::DesiredLink& link,
                                std::uint64_t seed) {
  return empirical_ber(i_agg, desired_fading(i_agg.size(), link.m, seed), link);
}

// sup |F_n - F| for the empirical CDF of `samples`.
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw DomainError("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    worst = std::max({worst, std::abs(F - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - F)});
  }
  return worst;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += std::abs((i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0));
  }
  return 0.5 * sum;
}

// One row per trial: trial index, active count, aggregate interference.
inline void write_samples_csv(std::ostream& os, const ScenarioSamples& samples) {
  os << "trial,K,i_agg\n";
  char buf[64];
  for (std::size_t i = 0; i < samples.trials.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", samples.trials[i].i_agg);
    os << i << ',' << samples.trials[i].active << ',' << buf << '\n';
  }
}

}  // namespace spatspec::montecarlo

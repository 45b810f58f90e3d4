#pragma once

// Experiment commands behind the CLI: parameter sweeps written as CSV, and the
// validation suite. Every CSV starts with a '#' comment block holding the tool
// version and the resolved configuration. Keys that cannot change the numbers
// (threads, output) are left out, so a fixed seed gives identical bytes for
// any thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spatspec/blockage.hpp"
#include "spatspec/config.hpp"
#include "spatspec/errors.hpp"
#include "spatspec/geometry.hpp"
#include "spatspec/model.hpp"
#include "spatspec/montecarlo.hpp"
#include "spatspec/numerics.hpp"
#include "spatspec/performance.hpp"
#include "spatspec/version.hpp"

namespace spatspec::experiments {

using config::format_number;
using config::NetworkConfig;

struct CsvFile {
  std::string suffix;  // appended to the output stem; empty for a single file
  std::string content;
};

inline std::string header_block(const NetworkConfig& cfg, const std::string& command,
                                 const std::string& sweep_note = {}) {
  std::ostringstream os;
  os << "# spatspec " << kVersion << "\n# command = " << command << '\n';
  for (const auto& k : config::key_table()) {
    if (!config::affects_output(k.name)) continue;
    const std::string& v = cfg.raw.at(k.name);
    os << "# " << k.name << " =" << (v.empty() ? "" : " ") << v << '\n';
  }
  if (!sweep_note.empty()) os << "# sweep point: " << sweep_note << '\n';
  return os.str();
}

struct SweepPoint {
  NetworkConfig cfg;
  std::string label;   // "N = 50"
  std::string suffix;  // "_N50"
  double value = 0.0;
};

inline std::vector<SweepPoint> sweep_points(const NetworkConfig& cfg) {
  std::vector<SweepPoint> out;
  if (cfg.sweep_param.empty()) {
    out.push_back({cfg, {}, {}, 0.0});
    return out;
  }
  for (double v : cfg.sweep_values) {
    auto point = config::with_value(cfg, cfg.sweep_param, v);
    out.push_back({std::move(point), cfg.sweep_param + " = " + format_number(v),
                   "_" + cfg.sweep_param + format_number(v), v});
  }
  return out;
}

// Columns: <sweep_param>,pb_lower,pb_upper,pb_mc,pb_mc_stderr
inline CsvFile cmd_blockage(const NetworkConfig& cfg) {
  if (cfg.sweep_param.empty() || cfg.sweep_values.empty()) {
    throw config::ConfigError("blockage: needs sweep_param and a non-empty sweep_values grid");
  }
  std::ostringstream os;
  os << header_block(cfg, "blockage");
  os << cfg.sweep_param << ",pb_lower,pb_upper,pb_mc,pb_mc_stderr\n";
  for (const auto& point : sweep_points(cfg)) {
    const auto params = point.cfg.blockage_params();
    const auto analytic = blockage::pb(params);
    const auto mc = montecarlo::run_blockage_mc(params, cfg.trials, cfg.seed, cfg.threads);
    os << format_number(point.value) << ',' << format_number(analytic.pb_lower) << ','
       << format_number(analytic.pb_upper) << ',' << format_number(mc.mean) << ',' << format_number(mc.std_error)
       << '\n';
  }
  return {{}, os.str()};
}

// Evaluates f(i) for i in [0, n) on the configured threads, in index order.
inline std::vector<performance::MetricResult> metric_grid(std::size_t n, int threads,
                                                          const std::function<performance::MetricResult(std::size_t)>& f) {
  std::vector<performance::MetricResult> out(n);
  montecarlo::parallel_for(n, threads, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

// One file per sweep point. Columns:
// SNR_dB,ber_analytic,ber_mc,ber_mc_stderr,ber_no_interference[,ber_rayleigh when m = 1]
inline std::vector<CsvFile> cmd_ber(const NetworkConfig& cfg) {
  if (cfg.snr_db_grid.empty()) throw config::ConfigError("ber: snr_db_grid is empty");
  std::vector<CsvFile> files;
  for (const auto& point : sweep_points(cfg)) {
    const NetworkModel model(point.cfg);
    const auto samples = montecarlo::run_scenario_mc(model.scenario(), cfg.trials, cfg.seed, cfg.threads);
    const auto i_agg = samples.i_agg();
    const auto h0 = montecarlo::desired_fading(i_agg.size(), point.cfg.m, cfg.seed);
    const auto mgf = model.aggregate_mgf();
    const auto& grid = cfg.snr_db_grid;
    const auto ber = metric_grid(grid.size(), cfg.threads, [&](std::size_t i) {
      return performance::average_ber(model.desired_at_snr(grid[i]), mgf);
    });
    const auto clean = metric_grid(grid.size(), cfg.threads, [&](std::size_t i) {
      return performance::average_ber(model.desired_at_snr(grid[i]), performance::kNoInterference);
    });
    const bool rayleigh = point.cfg.m == 1.0;
    std::ostringstream os;
    os << header_block(point.cfg, "ber", point.label);
    os << "SNR_dB,ber_analytic,ber_mc,ber_mc_stderr,ber_no_interference" << (rayleigh ? ",ber_rayleigh" : "") << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto link = model.desired_at_snr(grid[i]);
      const auto mc = montecarlo::empirical_ber(i_agg, h0, link);
      os << format_number(grid[i]) << ',' << format_number(ber[i].value) << ',' << format_number(mc.mean) << ','
         << format_number(mc.std_error) << ',' << format_number(clean[i].value);
      if (rayleigh) os << ',' << format_number(performance::rayleigh_ber(link.snr()));
      os << '\n';
    }
    files.push_back({point.suffix, os.str()});
  }
  return files;
}

// One file per sweep point. Columns: eta_dB,outage_analytic,outage_mc,outage_mc_stderr
inline std::vector<CsvFile> cmd_outage(const NetworkConfig& cfg) {
  if (cfg.eta_db_grid.empty()) throw config::ConfigError("outage: eta_db_grid is empty");
  std::vector<CsvFile> files;
  for (const auto& point : sweep_points(cfg)) {
    const NetworkModel model(point.cfg);
    const auto samples = montecarlo::run_scenario_mc(model.scenario(), cfg.trials, cfg.seed, cfg.threads);
    const auto i_agg = samples.i_agg();
    const auto h0 = montecarlo::desired_fading(i_agg.size(), point.cfg.m, cfg.seed);
    const auto mgf = model.aggregate_mgf();
    const auto link = model.desired();
    const auto& grid = cfg.eta_db_grid;
    const auto out = metric_grid(grid.size(), cfg.threads, [&](std::size_t i) {
      return performance::outage_probability(config::db_to_linear(grid[i]), link, mgf);
    });
    std::ostringstream os;
    os << header_block(point.cfg, "outage", point.label);
    os << "eta_dB,outage_analytic,outage_mc,outage_mc_stderr\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto mc = montecarlo::empirical_outage(i_agg, h0, link, config::db_to_linear(grid[i]));
      os << format_number(grid[i]) << ',' << format_number(out[i].value) << ',' << format_number(mc.mean) << ','
         << format_number(mc.std_error) << '\n';
    }
    files.push_back({point.suffix, os.str()});
  }
  return files;
}

// ---------------------------------------------------------------------------
// Checks

enum class CheckKind {
  oracle,  // analytic value against an independent computation
  trend,   // qualitative property the model must have
  claim,   // qualitative statement about specific figures; reported, not gating
};

inline const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::oracle:
      return "oracle";
    case CheckKind::trend:
      return "trend";
    default:
      return "claim";
  }
}

struct Check {
  std::string name;
  CheckKind kind = CheckKind::oracle;
  bool passed = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string note;

  bool gating() const { return kind != CheckKind::claim; }
};

// Runs `body`, turning library errors into a failed check.
inline Check guarded(const std::string& name, CheckKind kind, const std::function<Check()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, kind, false, std::nan(""), std::nan(""), std::string("error: ") + e.what()};
  }
}

namespace detail {

inline double ks_threshold(std::size_t n) { return std::max(0.01, 1.63 / std::sqrt(static_cast<double>(n))); }

constexpr std::size_t kBlock = 4096;

// n draws of g(rng), one generator per block of kBlock draws.
template <class Draw>
std::vector<double> draw_blocks(std::size_t n, std::uint64_t seed, std::uint64_t stream, int threads, Draw draw) {
  std::vector<double> out(n);
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  montecarlo::parallel_for(blocks, threads, [&](std::size_t b) {
    auto rng = montecarlo::trial_rng(seed, stream, b);
    for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) out[i] = draw(rng);
  });
  return out;
}

inline double binomial_pmf(long k, long n, double q) {
  if (q <= 0) return k == 0 ? 1.0 : 0.0;
  if (q >= 1) return k == n ? 1.0 : 0.0;
  return std::exp(numerics::lgamma_fn(n + 1.0) - numerics::lgamma_fn(k + 1.0) - numerics::lgamma_fn(n - k + 1.0) +
                  k * std::log(q) + (n - k) * std::log1p(-q));
}

}  // namespace detail

// Both distance laws integrate to one.
inline std::vector<Check> check_distribution_mass(const NetworkConfig& cfg) {
  std::vector<Check> out;
  const auto disk = cfg.disk();
  const auto anchor = cfg.anchor();
  const auto band = cfg.band();
  out.push_back(guarded("distance_pdf_mass", CheckKind::oracle, [&] {
    numerics::QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-13;
    const double knee = disk.R - anchor.v0_norm;
    auto f = [&](double l) { return geometry::distance_pdf(l, disk, anchor); };
    double mass = numerics::integrate(f, 0.0, knee, spec);
    if (anchor.v0_norm > 0) mass += numerics::integrate(f, knee, disk.R + anchor.v0_norm, spec);
    const double err = std::abs(mass - 1.0);
    return Check{"distance_pdf_mass", CheckKind::oracle, err <= 1e-9, err, 1e-9, {}};
  }));
  out.push_back(guarded("spectral_pdf_mass", CheckKind::oracle, [&] {
    numerics::QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-13;
    const auto reach = geometry::spectral_reach(band, anchor);
    auto f = [&](double w) { return geometry::spectral_distance_pdf(w, band, anchor) * band.width(); };
    double mass = reach.near > 0 ? numerics::integrate(f, 0.0, reach.near, spec) : 0.0;
    if (reach.far > reach.near) mass += numerics::integrate(f, reach.near, reach.far, spec);
    mass /= band.width();
    const double err = std::abs(mass - 1.0);
    return Check{"spectral_pdf_mass", CheckKind::oracle, err <= 1e-9, err, 1e-9, {}};
  }));
  return out;
}

// Kolmogorov-Smirnov distance between n sampled draws and each analytic CDF.
inline std::vector<Check> check_distribution_ks(const NetworkConfig& cfg, std::size_t n, std::uint64_t seed,
                                                int threads) {
  std::vector<Check> out;
  const auto disk = cfg.disk();
  const auto anchor = cfg.anchor();
  const auto band = cfg.band();
  const double thr = detail::ks_threshold(n);
  out.push_back(guarded("distance_ks", CheckKind::oracle, [&] {
    auto l = detail::draw_blocks(n, seed, 101, threads, [&](std::mt19937_64& rng) {
      return norm(anchor.position() - geometry::sample_uniform_disk(rng, disk));
    });
    const double ks = montecarlo::ks_distance(std::move(l), [&](double x) { return geometry::distance_cdf(x, disk, anchor); });
    return Check{"distance_ks", CheckKind::oracle, ks < thr, ks, thr, "n = " + std::to_string(n)};
  }));
  out.push_back(guarded("spectral_ks", CheckKind::oracle, [&] {
    auto w = detail::draw_blocks(n, seed, 102, threads, [&](std::mt19937_64& rng) {
      return std::abs(geometry::sample_interferer(rng, disk, band).frequency - anchor.f0);
    });
    const double ks =
        montecarlo::ks_distance(std::move(w), [&](double x) { return geometry::spectral_distance_cdf(x, band, anchor); });
    return Check{"spectral_ks", CheckKind::oracle, ks < thr, ks, thr, "n = " + std::to_string(n)};
  }));
  return out;
}

// Largest drop of `values` below a previously seen value (0 when non-decreasing).
inline double worst_decrease(const std::vector<double>& values) {
  double worst = 0.0, peak = -HUGE_VAL;
  for (double v : values) {
    worst = std::max(worst, peak - v);
    peak = std::max(peak, v);
  }
  return worst;
}

inline std::vector<double> log_grid(double lo_exp, double hi_exp, double step) {
  std::vector<double> out;
  for (int i = 0; lo_exp + i * step <= hi_exp + 1e-12; ++i) out.push_back(std::pow(10.0, lo_exp + i * step));
  return out;
}

// Blockage trends on three one-parameter grids. The density trend is a
// property of the formulas; the beamwidth and radius trends are the figure
// claims and are reported without gating.
struct BlockageGrids {
  blockage::BlockageParams rho_base;
  std::vector<double> rho;
  blockage::BlockageParams theta_base;
  std::vector<double> theta;  // half-angles [rad]
  blockage::BlockageParams radius_base;
  std::vector<double> radius;
  CheckKind theta_kind = CheckKind::claim;
  CheckKind radius_kind = CheckKind::claim;
};

inline BlockageGrids blockage_grids(const NetworkConfig& cfg) {
  BlockageGrids g;
  g.rho_base = g.theta_base = g.radius_base = cfg.blockage_params();
  g.rho = log_grid(-3.0, -0.5, 0.25);
  for (int deg = 5; deg <= 35; deg += 5) g.theta.push_back(deg * std::numbers::pi / 180.0);
  for (int k = 1; k <= 8; ++k) g.radius.push_back(cfg.v0_norm + 5.0 * k);
  return g;
}

inline std::vector<Check> check_blockage_trends(const BlockageGrids& g) {
  std::vector<Check> out;
  auto sweep = [](blockage::BlockageParams base, const std::vector<double>& xs,
                  const std::function<void(blockage::BlockageParams&, double)>& set) {
    std::vector<blockage::BlockageResult> r;
    for (double x : xs) {
      set(base, x);
      r.push_back(blockage::pb(base));
    }
    return r;
  };
  auto mids = [](const std::vector<blockage::BlockageResult>& r, bool lower) {
    std::vector<double> v;
    for (const auto& x : r) v.push_back(lower ? x.pb_lower : x.pb_upper);
    return v;
  };
  out.push_back(guarded("pb_zero_density", CheckKind::oracle, [&] {
    auto p = g.rho_base;
    p.rho = 0.0;
    const auto r = blockage::pb(p);
    const double worst = std::max(r.pb_lower, r.pb_upper);
    return Check{"pb_zero_density", CheckKind::oracle, r.pb_lower == 0.0 && r.pb_upper == 0.0, worst, 0.0, {}};
  }));
  std::vector<blockage::BlockageResult> all;
  out.push_back(guarded("pb_nondecreasing_rho", CheckKind::trend, [&] {
    const auto r = sweep(g.rho_base, g.rho, [](auto& p, double x) { p.rho = x; });
    all.insert(all.end(), r.begin(), r.end());
    const double drop = std::max(worst_decrease(mids(r, true)), worst_decrease(mids(r, false)));
    return Check{"pb_nondecreasing_rho", CheckKind::trend, drop <= 0.0, drop, 0.0, "rho = 1e-3 .. 10^-0.5"};
  }));
  out.push_back(guarded("pb_nonincreasing_theta", g.theta_kind, [&] {
    const auto r = sweep(g.theta_base, g.theta, [](auto& p, double x) { p.theta = x; });
    all.insert(all.end(), r.begin(), r.end());
    auto lo = mids(r, true), hi = mids(r, false);
    for (double& v : lo) v = -v;
    for (double& v : hi) v = -v;
    const double rise = std::max(worst_decrease(lo), worst_decrease(hi));
    return Check{"pb_nonincreasing_theta", g.theta_kind, rise <= 0.0, rise, 0.0, "theta = 5 .. 35 deg"};
  }));
  out.push_back(guarded("pb_nondecreasing_R", g.radius_kind, [&] {
    const auto r = sweep(g.radius_base, g.radius, [](auto& p, double x) { p.R = x; });
    all.insert(all.end(), r.begin(), r.end());
    const double drop = std::max(worst_decrease(mids(r, true)), worst_decrease(mids(r, false)));
    return Check{"pb_nondecreasing_R", g.radius_kind, drop <= 0.0, drop, 0.0,
                 "R = " + format_number(g.radius.front()) + " .. " + format_number(g.radius.back())};
  }));
  out.push_back(guarded("pb_bounds_ordered", CheckKind::oracle, [&] {
    double worst = 0.0;
    for (const auto& r : all) worst = std::max(worst, r.pb_lower - r.pb_upper);
    return Check{"pb_bounds_ordered", CheckKind::oracle, worst <= 0.0 && !all.empty(), worst, 0.0, {}};
  }));
  return out;
}

// Geometric blockage rate against the analytic bounds (reported only).
inline Check check_blockage_mc(const blockage::BlockageParams& params, long trials, std::uint64_t seed, int threads) {
  return guarded("pb_mc_vs_bounds", CheckKind::claim, [&] {
    const auto r = blockage::pb(params);
    const auto mc = montecarlo::run_blockage_mc(params, trials, seed, threads);
    const bool inside = mc.mean >= r.pb_lower - 3 * mc.std_error && mc.mean <= r.pb_upper + 3 * mc.std_error;
    return Check{"pb_mc_vs_bounds", CheckKind::claim, inside, mc.mean, r.pb_mid(),
                 "analytic [" + format_number(r.pb_lower) + ", " + format_number(r.pb_upper) + "], mc stderr " +
                     format_number(mc.std_error)};
  });
}

// Binomial thinning pmf against a brute-force enumeration of all slot states.
inline Check check_thinning_exact(double p, double pb, long n_max = 10) {
  return guarded("thinning_pmf_exact", CheckKind::oracle, [&] {
    const double a = p * (1.0 - pb);
    double worst = 0.0;
    for (long N = 0; N <= n_max; ++N) {
      std::vector<double> brute(static_cast<std::size_t>(N) + 1, 0.0);
      for (unsigned long mask = 0; mask < (1ul << N); ++mask) {
        double prob = 1.0;
        long k = 0;
        for (long s = 0; s < N; ++s) {
          if (mask >> s & 1ul) {
            prob *= a;
            ++k;
          } else {
            prob *= 1.0 - a;
          }
        }
        brute[static_cast<std::size_t>(k)] += prob;
      }
      for (long k = 0; k <= N; ++k) {
        worst = std::max(worst, std::abs(blockage::active_count_pmf(k, N, p, pb) - brute[static_cast<std::size_t>(k)]));
      }
    }
    return Check{"thinning_pmf_exact", CheckKind::oracle, worst <= 1e-12, worst, 1e-12,
                 "N <= " + std::to_string(n_max)};
  });
}

// Active-count pmf of the scenario Monte-Carlo against Binomial(N, p (1 - pb_mc)).
// The threshold widens to about three times the sampling noise when trials are few.
inline Check check_thinning_mc(const montecarlo::ScenarioSamples& samples, double p) {
  return guarded("thinning_tv_mc", CheckKind::oracle, [&] {
    const double q = p * (1.0 - samples.pb_mc());
    const auto emp = samples.k_pmf();
    std::vector<double> binom(emp.size());
    double noise = 0.0;
    const double n = static_cast<double>(samples.trials.size());
    for (std::size_t k = 0; k < emp.size(); ++k) {
      binom[k] = detail::binomial_pmf(static_cast<long>(k), samples.N, q);
      noise += std::sqrt(binom[k] * (1.0 - binom[k]) / n);
    }
    const double tv = montecarlo::total_variation(emp, binom);
    const double thr = std::max(0.02, 1.2 * noise);
    return Check{"thinning_tv_mc", CheckKind::oracle, tv < thr, tv, thr,
                 "pb_mc = " + format_number(samples.pb_mc()) + ", trials = " + std::to_string(samples.trials.size())};
  });
}

// Aggregate MGF against the sample mean of exp(s I) on s_k = -(k/5)/E[I], k = 1..10,
// with the blockage rate measured by the same simulation.
inline Check check_mgf_vs_mc(const NetworkModel& model, const montecarlo::ScenarioSamples& samples) {
  return guarded("mgf_vs_mc", CheckKind::oracle, [&] {
    const auto& cfg = model.config();
    const double pb = samples.pb_mc();
    const double mean_i = static_cast<double>(cfg.N) * cfg.p * (1.0 - pb) * model.interference().mean_power();
    const auto i_agg = samples.i_agg();
    double worst = 0.0;
    bool ok = true;
    for (int k = 1; k <= 10; ++k) {
      const double s = -(k / 5.0) / mean_i;
      const double analytic = model.interference().aggregate_mgf(s, cfg.N, cfg.p, pb).real();
      const auto mc = montecarlo::empirical_mgf(i_agg, s);
      const double tol = std::max(0.01 * std::abs(analytic), 3.0 * mc.std_error);
      const double dev = std::abs(analytic - mc.mean);
      ok = ok && dev <= tol;
      worst = std::max(worst, dev / tol);
    }
    return Check{"mgf_vs_mc", CheckKind::oracle, ok, worst, 1.0, "max deviation / max(1%, 3 stderr)"};
  });
}

// Series against direct evaluation well inside the series' radius of convergence.
inline Check check_series_vs_direct(const NetworkModel& model) {
  return guarded("series_vs_direct", CheckKind::oracle, [&] {
    const auto& link = model.interference().link();
    const double tol = model.interference().evaluator().tol;
    const double a_max = link.q * std::pow(link.epsilon, -link.alpha) * model.profile()->upsilon0();
    const interference::InterferenceModel series(link, model.interference().field(), {interference::MgfMode::series,
                                                                                     model.config().mgf.n_max, tol});
    double worst = 0.0;
    for (double frac : {0.01, 0.05, 0.1, 0.25}) {
      const double s = -frac * link.m / a_max;
      worst = std::max(worst, std::abs(series.series(s).value - model.interference().direct(s).real()));
    }
    return Check{"series_vs_direct", CheckKind::oracle, worst <= 10 * tol, worst, 10 * tol,
                 "|s| <= m / (4 q eps^-alpha Upsilon(0))"};
  });
}

// Closed forms with the interference switched off.
inline std::vector<Check> check_zero_interference(const NetworkConfig& cfg) {
  std::vector<Check> out;
  out.push_back(guarded("outage_gamma_cdf", CheckKind::oracle, [&] {
    const auto link = cfg.desired();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double eta = config::db_to_linear(-10.0 + 2.0 * i);
      const auto r = performance::outage_probability(eta, link, performance::kNoInterference);
      worst = std::max(worst, std::abs(r.value - performance::outage_without_interference(eta, link)));
    }
    return Check{"outage_gamma_cdf", CheckKind::oracle, worst <= 1e-4, worst, 1e-4, "eta = -10 .. 28 dB"};
  }));
  out.push_back(guarded("ber_rayleigh", CheckKind::oracle, [&] {
    auto link = cfg.desired();
    link.m = 1.0;
    link.c = 1.0;
    double worst = 0.0;
    for (double snr_db : {0.0, 5.0, 10.0, 20.0}) {
      link.noise = link.gain() / config::db_to_linear(snr_db);
      const auto r = performance::average_ber(link, performance::kNoInterference);
      worst = std::max(worst, std::abs(r.value - performance::rayleigh_ber(link.snr())));
    }
    return Check{"ber_rayleigh", CheckKind::oracle, worst <= 1e-5, worst, 1e-5, "m = 1, c = 1, SNR 0/5/10/20 dB"};
  }));
  return out;
}

struct CurveComparison {
  std::vector<double> x;
  std::vector<double> analytic;
  std::vector<double> blind;  // blockage switched off (pb = 0)
  std::vector<montecarlo::McEstimate> mc;
};

inline CurveComparison ber_curves(const NetworkModel& model, const std::vector<double>& i_agg,
                                  const std::vector<double>& h0, const std::vector<double>& snr_db, int threads) {
  CurveComparison c;
  c.x = snr_db;
  const auto aware = model.aggregate_mgf();
  const auto blind = model.aggregate_mgf(0.0);
  const auto a = metric_grid(snr_db.size(), threads, [&](std::size_t i) {
    return performance::average_ber(model.desired_at_snr(snr_db[i]), aware);
  });
  const auto b = metric_grid(snr_db.size(), threads, [&](std::size_t i) {
    return performance::average_ber(model.desired_at_snr(snr_db[i]), blind);
  });
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    c.analytic.push_back(a[i].value);
    c.blind.push_back(b[i].value);
    if (!i_agg.empty()) c.mc.push_back(montecarlo::empirical_ber(i_agg, h0, model.desired_at_snr(snr_db[i])));
  }
  return c;
}

inline CurveComparison outage_curves(const NetworkModel& model, const std::vector<double>& i_agg,
                                     const std::vector<double>& h0, const std::vector<double>& eta_db, int threads,
                                     bool with_blind = true) {
  CurveComparison c;
  c.x = eta_db;
  const auto link = model.desired();
  const auto aware = model.aggregate_mgf();
  const auto blind = model.aggregate_mgf(0.0);
  const auto a = metric_grid(eta_db.size(), threads, [&](std::size_t i) {
    return performance::outage_probability(config::db_to_linear(eta_db[i]), link, aware);
  });
  for (std::size_t i = 0; i < eta_db.size(); ++i) {
    c.analytic.push_back(a[i].value);
    if (!i_agg.empty()) c.mc.push_back(montecarlo::empirical_outage(i_agg, h0, link, config::db_to_linear(eta_db[i])));
  }
  if (with_blind) {
    const auto b = metric_grid(eta_db.size(), threads, [&](std::size_t i) {
      return performance::outage_probability(config::db_to_linear(eta_db[i]), link, blind);
    });
    for (const auto& r : b) c.blind.push_back(r.value);
  }
  return c;
}

// Relative BER error wherever the simulated BER exceeds 1e-3. With few trials
// a point also passes inside three standard errors unless `strict`.
inline Check check_ber_vs_mc(const CurveComparison& c, bool strict = false) {
  double worst = 0.0;
  bool ok = true;
  int used = 0;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    if (!(c.mc[i].mean > 1e-3)) continue;
    ++used;
    const double rel = std::abs(c.analytic[i] - c.mc[i].mean) / c.mc[i].mean;
    worst = std::max(worst, rel);
    ok = ok && (rel < 0.05 || (!strict && std::abs(c.analytic[i] - c.mc[i].mean) <= 3 * c.mc[i].std_error));
  }
  return {"ber_vs_mc", CheckKind::oracle, ok && used > 0, worst, 0.05,
          std::to_string(used) + " SNR points with BER > 1e-3" + (strict ? "" : "; a point also passes within 3 stderr")};
}

inline Check check_outage_vs_mc(const CurveComparison& c, bool strict = false) {
  double worst = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    const double dev = std::abs(c.analytic[i] - c.mc[i].mean);
    worst = std::max(worst, dev);
    ok = ok && (dev < 0.02 || (!strict && dev <= 3 * c.mc[i].std_error));
  }
  return {"outage_vs_mc", CheckKind::oracle, ok && !c.x.empty(), worst, 0.02,
          std::to_string(c.x.size()) + " thresholds" + (strict ? "" : "; a point also passes within 3 stderr")};
}

// Blockage lowers outage: never above the blockage-blind curve, and by at
// least `gap` at the threshold where the blind outage is closest to one half.
inline std::vector<Check> check_outage_gap(const CurveComparison& c, double gap = 0.01) {
  std::vector<Check> out;
  double worst = 0.0;
  std::size_t median = 0;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    worst = std::max(worst, c.analytic[i] - c.blind[i]);
    if (std::abs(c.blind[i] - 0.5) < std::abs(c.blind[median] - 0.5)) median = i;
  }
  out.push_back({"outage_blockage_ordering", CheckKind::trend, worst <= 1e-9, worst, 1e-9, "aware - blind"});
  const double d = c.blind.empty() ? 0.0 : c.blind[median] - c.analytic[median];
  out.push_back({"outage_blockage_gap", CheckKind::claim, d >= gap, d, gap,
                 c.x.empty() ? std::string() : "at eta = " + format_number(c.x[median]) + " dB"});
  return out;
}

inline Check check_ber_ordering(const CurveComparison& c) {
  double worst = -HUGE_VAL;
  for (std::size_t i = 0; i < c.x.size(); ++i) worst = std::max(worst, c.analytic[i] - c.blind[i]);
  return {"ber_blockage_ordering", CheckKind::trend, worst < 0.0, worst, 0.0, "max(aware - blind) < 0"};
}

struct ValidationReport {
  std::vector<Check> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || !c.gating(); });
  }
};

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline std::string report_csv(const NetworkConfig& cfg, const ValidationReport& report) {
  std::ostringstream os;
  os << header_block(cfg, "validate");
  os << "check,kind,passed,statistic,threshold,note\n";
  for (const auto& c : report.checks) {
    os << c.name << ',' << to_string(c.kind) << ',' << (c.passed ? 1 : 0) << ',' << format_number(c.statistic) << ','
       << format_number(c.threshold) << ',' << quote(c.note) << '\n';
  }
  return os.str();
}

// The validation suite at the configured scenario and trial count.
inline ValidationReport cmd_validate(const NetworkConfig& cfg) {
  ValidationReport report;
  auto add = [&](std::vector<Check> cs) { report.checks.insert(report.checks.end(), cs.begin(), cs.end()); };
  const auto trials = static_cast<std::size_t>(cfg.trials);

  add(check_distribution_mass(cfg));
  add(check_distribution_ks(cfg, trials, cfg.seed, cfg.threads));
  add(check_blockage_trends(blockage_grids(cfg)));
  if (cfg.rho > 0) report.checks.push_back(check_blockage_mc(cfg.blockage_params(), cfg.trials, cfg.seed, cfg.threads));

  const NetworkModel model(cfg);
  report.checks.push_back(check_thinning_exact(cfg.p, model.pb()));
  const auto samples = montecarlo::run_scenario_mc(model.scenario(), cfg.trials, cfg.seed, cfg.threads);
  report.checks.push_back(check_thinning_mc(samples, cfg.p));
  report.checks.push_back(check_mgf_vs_mc(model, samples));
  if (cfg.epsilon > 0) report.checks.push_back(check_series_vs_direct(model));
  add(check_zero_interference(cfg));

  const auto i_agg = samples.i_agg();
  const auto h0 = montecarlo::desired_fading(i_agg.size(), cfg.m, cfg.seed);
  if (!cfg.snr_db_grid.empty()) {
    report.checks.push_back(guarded("ber_vs_mc", CheckKind::oracle, [&] {
      const auto c = ber_curves(model, i_agg, h0, cfg.snr_db_grid, cfg.threads);
      report.checks.push_back(check_ber_ordering(c));
      return check_ber_vs_mc(c);
    }));
  }
  if (!cfg.eta_db_grid.empty()) {
    report.checks.push_back(guarded("outage_vs_mc", CheckKind::oracle, [&] {
      const auto c = outage_curves(model, i_agg, h0, cfg.eta_db_grid, cfg.threads);
      add(check_outage_gap(c));
      return check_outage_vs_mc(c);
    }));
  }
  return report;
}

}  // namespace spatspec::experiments

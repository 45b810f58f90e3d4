#pragma once

// Flat key = value experiment configuration. Every key has a default; a file
// overrides a subset, and unknown or repeated keys are errors. Powers are in
// dBm, frequencies in GHz and the beam is given as its full width in degrees;
// NetworkConfig holds SI units and the half-angle in radians.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spatspec/blockage.hpp"
#include "spatspec/errors.hpp"
#include "spatspec/geometry.hpp"
#include "spatspec/interference.hpp"
#include "spatspec/performance.hpp"
#include "spatspec/spectral.hpp"

namespace spatspec::config {

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class KeyKind { real, integer, choice, grid, text };

struct KeySpec {
  const char* name;
  KeyKind kind;
  const char* fallback;  // empty: unset
  const char* choices;   // '|'-separated, for KeyKind::choice
  const char* help;
};

// The complete key list, in the order the header block prints it.
inline const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> keys = {
      {"R", KeyKind::real, "25", "", "network disk radius [m]"},
      {"v0_norm", KeyKind::real, "10", "", "receiver distance from the disk centre [m]"},
      {"N", KeyKind::integer, "100", "", "interferer slots"},
      {"p", KeyKind::real, "1", "", "probability that a slot holds an active AP"},
      {"rho", KeyKind::real, "0.01", "", "obstacle density [1/m^2]"},
      {"f0_ghz", KeyKind::real, "62", "", "receiver carrier [GHz]"},
      {"fs_ghz", KeyKind::real, "58", "", "band start [GHz]"},
      {"fe_ghz", KeyKind::real, "64", "", "band end [GHz]"},
      {"W_ghz", KeyKind::real, "2.16", "", "channel bandwidth [GHz]"},
      {"ds", KeyKind::real, "0.2", "", "smallest obstacle radius [m]"},
      {"de", KeyKind::real, "0.8", "", "largest obstacle radius [m]"},
      {"beamwidth_deg", KeyKind::real, "20", "", "full beamwidth 2*theta [deg]"},
      {"alpha", KeyKind::real, "2.5", "", "pathloss exponent"},
      {"m", KeyKind::real, "5", "", "Nakagami shape (interferers and desired link)"},
      {"q_dbm", KeyKind::real, "30", "", "interferer transmit power [dBm]"},
      {"q0_dbm", KeyKind::real, "30", "", "desired transmit power [dBm]"},
      {"l0", KeyKind::real, "1", "", "desired link distance [m]"},
      {"snr_db", KeyKind::real, "20", "", "reference SNR q0 l0^-alpha / noise [dB]; sets the noise power"},
      {"noise_dbm", KeyKind::real, "", "", "noise power [dBm]; replaces snr_db when set"},
      {"c", KeyKind::real, "1", "", "modulation constant in Q(sqrt(2 c SINR))"},
      {"epsilon", KeyKind::real, "1", "", "guard zone radius around the receiver [m]"},
      {"psd", KeyKind::choice, "gaussian", "gaussian|rectangular", "interferer PSD shape"},
      {"psd_bandwidth_ghz", KeyKind::real, "0", "", "PSD bandwidth [GHz]; 0 means W (Gaussian sigma = bandwidth/4)"},
      {"filter", KeyKind::choice, "raised_cosine", "raised_cosine|ideal", "receiver filter"},
      {"rolloff", KeyKind::real, "0.25", "", "raised-cosine roll-off"},
      {"mixing", KeyKind::choice, "probability_consistent", "probability_consistent|paper_literal",
       "weights combining the close- and far-range blockage terms"},
      {"pb_bound", KeyKind::choice, "mid", "lower|mid|upper", "blockage value fed to the interference model"},
      {"mgf_mode", KeyKind::choice, "direct", "direct|series", "per-interferer MGF evaluation"},
      {"series_nmax", KeyKind::integer, "400", "", "series terms before giving up"},
      {"series_tol", KeyKind::real, "1e-10", "", "series / direct-quadrature tolerance"},
      {"sweep_param", KeyKind::text, "", "", "numeric key swept by blockage/ber/outage"},
      {"sweep_values", KeyKind::grid, "", "", "sweep grid: a, b, c or start:step:stop"},
      {"sweep_scale", KeyKind::choice, "linear", "linear|log10", "log10: sweep_values are exponents"},
      {"snr_db_grid", KeyKind::grid, "0:5:30", "", "ber x-axis [dB]"},
      {"eta_db_grid", KeyKind::grid, "-10:2:28", "", "outage thresholds [dB], strictly increasing"},
      {"trials", KeyKind::integer, "100000", "", "Monte-Carlo trials"},
      {"seed", KeyKind::integer, "1", "", "Monte-Carlo seed (u64)"},
      {"threads", KeyKind::integer, "1", "", "worker threads"},
      {"output", KeyKind::text, "", "", "output path (stdout when unset)"},
  };
  return keys;
}

inline const KeySpec* find_key(std::string_view name) {
  for (const auto& k : key_table()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

// Keys that never change the numbers written, left out of output headers.
inline bool affects_output(std::string_view name) { return name != "threads" && name != "output"; }

using RawConfig = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError("config: " + key + " = '" + text + "' is not a finite number");
  }
  return v;
}

inline std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("config: " + key + " = '" + text + "' is not a non-negative integer");
  }
  return v;
}

}  // namespace detail

inline std::string format_number(double v, int digits = 10) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// "a, b, c" or "start:step:stop" (inclusive; stop is reached within 1e-9 steps).
inline std::vector<double> parse_grid(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (detail::trim(text).empty()) return out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(detail::trim(part));
    if (parts.size() != 3) throw ConfigError("config: " + key + " range must be start:step:stop");
    const double a = detail::to_real(key, parts[0]), h = detail::to_real(key, parts[1]),
                 b = detail::to_real(key, parts[2]);
    if (!(h != 0) || (b - a) / h < -1e-9) throw ConfigError("config: " + key + " range never reaches its stop");
    const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    if (n > 1'000'000) throw ConfigError("config: " + key + " range has too many points");
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * h);
    return out;
  }
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(detail::to_real(key, detail::trim(part)));
  return out;
}

inline void set_key(RawConfig& raw, const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("config: unknown key '" + key + "'");
  raw[key] = value;
}

// Parses the text of a config file; `source` labels error messages.
inline RawConfig parse_config(std::istream& in, const std::string& source = "config") {
  RawConfig raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (!find_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (raw.count(key)) throw ConfigError(where + ": key '" + key + "' given twice");
    raw[key] = value;
  }
  return raw;
}

inline RawConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in, path);
}

enum class PbBound { lower, mid, upper };

struct NetworkConfig {
  double R = 25.0;
  double v0_norm = 10.0;
  long N = 100;
  double p = 1.0;
  double rho = 0.01;
  double f0 = 62e9, fs = 58e9, fe = 64e9, W = 2.16e9;
  double ds = 0.2, de = 0.8;
  double theta = 10.0 * std::numbers::pi / 180.0;  // half-angle [rad]
  double alpha = 2.5;
  double m = 5.0;
  double q = 1.0;   // W
  double q0 = 1.0;  // W
  double l0 = 1.0;
  double noise = 0.01;  // W
  double c = 1.0;
  double epsilon = 1.0;
  spectral::SpectralSettings spectral;
  blockage::Mixing mixing = blockage::Mixing::probability_consistent;
  PbBound pb_bound = PbBound::mid;
  interference::MgfEvaluator mgf;

  std::string sweep_param;
  std::vector<double> sweep_values;  // after sweep_scale
  std::vector<double> snr_db_grid;
  std::vector<double> eta_db_grid;

  long trials = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output;

  RawConfig raw;  // every key, defaults filled in

  geometry::Disk disk() const { return {R}; }
  geometry::ReceiverAnchor anchor() const { return {v0_norm, f0}; }
  geometry::Band band() const { return {fs, fe, W}; }
  blockage::BlockageParams blockage_params() const { return {rho, theta, ds, de, R, v0_norm, mixing}; }
  interference::LinkModel link() const { return {alpha, m, q, epsilon}; }
  performance::DesiredLink desired() const { return {q0, l0, m, noise, c, alpha}; }
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Fills defaults, converts units and validates every module's invariants.
inline NetworkConfig resolve(const RawConfig& given) {
  RawConfig raw;
  for (const auto& k : key_table()) raw[k.name] = k.fallback;
  for (const auto& [key, value] : given) {
    if (!find_key(key)) throw ConfigError("config: unknown key '" + key + "'");
    raw[key] = value;
  }
  auto has = [&](const char* key) { return !raw.at(key).empty(); };
  auto real = [&](const char* key) { return detail::to_real(key, raw.at(key)); };
  auto count = [&](const char* key) { return detail::to_unsigned(key, raw.at(key)); };
  auto choice = [&](const char* key) {
    const KeySpec* spec = find_key(key);
    const std::string& v = raw.at(key);
    std::stringstream ss(spec->choices);
    for (std::string option; std::getline(ss, option, '|');) {
      if (option == v) return v;
    }
    throw ConfigError(std::string("config: ") + key + " must be one of " + spec->choices + ", got '" + v + "'");
  };
  for (const auto& k : key_table()) {
    if (k.kind == KeyKind::real && has(k.name)) real(k.name);
    if (k.kind == KeyKind::integer && has(k.name)) count(k.name);
    if (k.kind == KeyKind::integer && !has(k.name)) throw ConfigError(std::string("config: ") + k.name + " is empty");
  }

  NetworkConfig c;
  c.R = real("R");
  c.v0_norm = real("v0_norm");
  c.N = static_cast<long>(count("N"));
  c.p = real("p");
  c.rho = real("rho");
  c.f0 = real("f0_ghz") * 1e9;
  c.fs = real("fs_ghz") * 1e9;
  c.fe = real("fe_ghz") * 1e9;
  c.W = real("W_ghz") * 1e9;
  c.ds = real("ds");
  c.de = real("de");
  c.theta = 0.5 * real("beamwidth_deg") * std::numbers::pi / 180.0;
  c.alpha = real("alpha");
  c.m = real("m");
  c.q = dbm_to_watt(real("q_dbm"));
  c.q0 = dbm_to_watt(real("q0_dbm"));
  c.l0 = real("l0");
  c.c = real("c");
  c.epsilon = real("epsilon");
  if (!(c.alpha > 0) || !(c.l0 > 0)) throw ConfigError("config: alpha and l0 must be positive");
  const double gain = c.q0 * std::pow(c.l0, -c.alpha);
  if (has("noise_dbm")) {
    if (given.count("snr_db") && !given.at("snr_db").empty()) {
      throw ConfigError("config: set either snr_db or noise_dbm, not both");
    }
    c.noise = dbm_to_watt(real("noise_dbm"));
    raw["snr_db"].clear();
  } else {
    c.noise = gain / db_to_linear(real("snr_db"));
  }

  c.spectral.W = c.W;
  c.spectral.psd_shape = choice("psd") == "gaussian" ? spectral::PsdShape::gaussian : spectral::PsdShape::rectangular;
  c.spectral.psd_bandwidth = real("psd_bandwidth_ghz") * 1e9;
  c.spectral.filter_shape =
      choice("filter") == "raised_cosine" ? spectral::FilterShape::raised_cosine : spectral::FilterShape::ideal;
  c.spectral.rolloff = real("rolloff");
  c.mixing = choice("mixing") == "paper_literal" ? blockage::Mixing::paper_literal
                                                 : blockage::Mixing::probability_consistent;
  const std::string bound = choice("pb_bound");
  c.pb_bound = bound == "lower" ? PbBound::lower : bound == "upper" ? PbBound::upper : PbBound::mid;
  c.mgf.mode = choice("mgf_mode") == "series" ? interference::MgfMode::series : interference::MgfMode::direct;
  c.mgf.n_max = static_cast<int>(std::min<std::uint64_t>(count("series_nmax"), 1u << 20));
  c.mgf.tol = real("series_tol");

  c.sweep_param = raw.at("sweep_param");
  c.sweep_values = parse_grid("sweep_values", raw.at("sweep_values"));
  if (choice("sweep_scale") == "log10") {
    for (double& v : c.sweep_values) v = std::pow(10.0, v);
  }
  if (!c.sweep_param.empty()) {
    const KeySpec* spec = find_key(c.sweep_param);
    if (!spec || (spec->kind != KeyKind::real && spec->kind != KeyKind::integer) ||
        c.sweep_param == "trials" || c.sweep_param == "seed" || c.sweep_param == "threads" ||
        c.sweep_param == "series_nmax") {
      throw ConfigError("config: sweep_param '" + c.sweep_param + "' is not a sweepable numeric key");
    }
  } else if (!c.sweep_values.empty()) {
    throw ConfigError("config: sweep_values given without sweep_param");
  }
  c.snr_db_grid = parse_grid("snr_db_grid", raw.at("snr_db_grid"));
  c.eta_db_grid = parse_grid("eta_db_grid", raw.at("eta_db_grid"));
  for (std::size_t i = 1; i < c.eta_db_grid.size(); ++i) {
    if (!(c.eta_db_grid[i] > c.eta_db_grid[i - 1])) throw ConfigError("config: eta_db_grid must be strictly increasing");
  }

  c.trials = static_cast<long>(count("trials"));
  c.seed = count("seed");
  c.threads = static_cast<int>(std::min<std::uint64_t>(count("threads"), 1024));
  c.output = raw.at("output");
  if (c.trials < 1) throw ConfigError("config: trials must be >= 1");
  if (c.threads < 1) throw ConfigError("config: threads must be >= 1");

  if (!(c.p >= 0 && c.p <= 1)) throw ConfigError("config: p must lie in [0, 1]");
  c.blockage_params().validate();
  geometry::validate(c.band(), c.anchor());
  c.spectral.validate();
  const auto link = c.link();
  link.validate();
  c.desired().validate();
  c.mgf.validate();
  if (!(c.epsilon < c.R - c.v0_norm)) throw ConfigError("config: epsilon must be smaller than R - v0_norm");
  if (c.mgf.mode == interference::MgfMode::series && c.epsilon == 0 && c.alpha > 0) {
    throw ConfigError(
        "config: mgf_mode = series needs a guard zone: with epsilon = 0 the pathloss moments E[l^-n alpha] "
        "diverge once n alpha >= 2; set epsilon > 0 or use mgf_mode = direct");
  }
  c.raw = std::move(raw);
  return c;
}

// The configuration with `key` overridden (one sweep point).
inline NetworkConfig with_value(const NetworkConfig& base, const std::string& key, double value) {
  RawConfig raw = base.raw;
  raw[key] = find_key(key) && find_key(key)->kind == KeyKind::integer
                 ? std::to_string(static_cast<long long>(std::llround(value)))
                 : format_number(value, 17);
  return resolve(raw);
}

}  // namespace spatspec::config

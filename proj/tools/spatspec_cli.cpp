#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spatspec/spatspec.hpp"

namespace {

using namespace spatspec;

struct Flags {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<int> threads;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output CSV path (stdout when omitted)");
  cmd->add_option("--seed", f.seed, "Monte-Carlo seed");
  cmd->add_option("--trials", f.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

config::NetworkConfig load(const Flags& f) {
  config::RawConfig raw = f.config_path.empty() ? config::RawConfig{} : config::load_config(f.config_path);
  if (f.seed) raw["seed"] = std::to_string(*f.seed);
  if (f.trials) raw["trials"] = std::to_string(*f.trials);
  if (f.threads) raw["threads"] = std::to_string(*f.threads);
  if (!f.out.empty()) raw["output"] = f.out;
  return config::resolve(raw);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw config::ConfigError("cannot write '" + path + "'");
  os << text;
  if (!os.flush()) throw config::ConfigError("failed writing '" + path + "'");
}

// stem + suffix + extension, e.g. out.csv with _N50 -> out_N50.csv
std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

void emit(const config::NetworkConfig& cfg, const std::vector<experiments::CsvFile>& files) {
  for (const auto& f : files) {
    if (cfg.output.empty()) {
      std::cout << f.content;
    } else {
      const auto path = with_suffix(cfg.output, f.suffix);
      write_text(path, f.content);
      std::cerr << "wrote " << path << '\n';
    }
  }
}

int run_validate(const config::NetworkConfig& cfg) {
  const auto report = experiments::cmd_validate(cfg);
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : c.gating() ? "FAIL " : "note ") << c.name << "  statistic="
              << config::format_number(c.statistic) << " threshold=" << config::format_number(c.threshold);
    if (!c.note.empty()) std::cout << "  (" << c.note << ')';
    std::cout << '\n';
  }
  for (const auto& c : report.checks) {
    nlohmann::ordered_json rec;
    rec["check"] = c.name;
    rec["kind"] = experiments::to_string(c.kind);
    rec["passed"] = c.passed;
    rec["statistic"] = c.statistic;
    rec["threshold"] = c.threshold;
    rec["note"] = c.note;
    std::cout << rec.dump() << '\n';
  }
  std::cout << (report.passed() ? "validate: all gating checks passed\n" : "validate: FAILED\n");
  if (!cfg.output.empty()) {
    write_text(cfg.output, experiments::report_csv(cfg, report));
    std::cerr << "wrote " << cfg.output << '\n';
  }
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial-spectral interference model and Monte-Carlo validation"};
  app.set_version_flag("--version", std::string(spatspec::kVersion));
  app.require_subcommand(1);
  Flags flags;
  auto* blockage = app.add_subcommand("blockage", "blockage probability over a parameter sweep");
  auto* ber = app.add_subcommand("ber", "average BER against SNR");
  auto* outage = app.add_subcommand("outage", "outage probability against the SINR threshold");
  auto* validate = app.add_subcommand("validate", "run the validation suite");
  for (auto* cmd : {blockage, ber, outage, validate}) add_flags(cmd, flags);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load(flags);
    if (blockage->parsed()) {
      emit(cfg, {experiments::cmd_blockage(cfg)});
    } else if (ber->parsed()) {
      emit(cfg, experiments::cmd_ber(cfg));
    } else if (outage->parsed()) {
      emit(cfg, experiments::cmd_outage(cfg));
    } else {
      return run_validate(cfg);
    }
  } catch (const spatspec::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

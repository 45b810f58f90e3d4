#pragma once

// Analytic model and Monte-Carlo scenario assembled from one NetworkConfig.

#include <memory>

#include "spatspec/blockage.hpp"
#include "spatspec/config.hpp"
#include "spatspec/interference.hpp"
#include "spatspec/montecarlo.hpp"
#include "spatspec/performance.hpp"
#include "spatspec/spectral.hpp"

namespace spatspec {

inline double select_pb(const blockage::BlockageResult& r, config::PbBound bound) {
  switch (bound) {
    case config::PbBound::lower:
      return r.pb_lower;
    case config::PbBound::upper:
      return r.pb_upper;
    default:
      return r.pb_mid();
  }
}

class NetworkModel {
 public:
  explicit NetworkModel(const config::NetworkConfig& cfg)
      : cfg_(cfg),
        profile_(std::make_shared<const spectral::SpectralProfile>(cfg.spectral)),
        interference_(std::make_shared<const interference::InterferenceModel>(
            cfg.link(), interference::InterfererField{cfg.disk(), cfg.anchor(), cfg.band(), profile_}, cfg.mgf)),
        blockage_(blockage::pb(cfg.blockage_params())),
        pb_(select_pb(blockage_, cfg.pb_bound)) {}

  const config::NetworkConfig& config() const { return cfg_; }
  std::shared_ptr<const spectral::SpectralProfile> profile() const { return profile_; }
  const interference::InterferenceModel& interference() const { return *interference_; }
  const blockage::BlockageResult& blockage() const { return blockage_; }
  double pb() const { return pb_; }

  // Aggregate-interference MGF with the configured blockage, or with `pb` given.
  performance::AggregateMgf aggregate_mgf() const { return aggregate_mgf(pb_); }
  performance::AggregateMgf aggregate_mgf(double pb) const {
    auto model = interference_;
    const long N = cfg_.N;
    const double p = cfg_.p;
    return [model, N, p, pb](performance::cplx s) { return model->aggregate_mgf(s, N, p, pb); };
  }

  performance::DesiredLink desired() const { return cfg_.desired(); }

  // Desired link with the noise set from a reference SNR in dB.
  performance::DesiredLink desired_at_snr(double snr_db) const {
    auto link = cfg_.desired();
    link.noise = link.gain() / config::db_to_linear(snr_db);
    return link;
  }

  montecarlo::ScenarioConfig scenario() const {
    montecarlo::ScenarioConfig sc;
    sc.N = cfg_.N;
    sc.p = cfg_.p;
    sc.disk = cfg_.disk();
    sc.anchor = cfg_.anchor();
    sc.band = cfg_.band();
    sc.rho = cfg_.rho;
    sc.theta = cfg_.theta;
    sc.ds = cfg_.ds;
    sc.de = cfg_.de;
    sc.link = cfg_.link();
    sc.profile = profile_;
    return sc;
  }

 private:
  config::NetworkConfig cfg_;
  std::shared_ptr<const spectral::SpectralProfile> profile_;
  std::shared_ptr<const interference::InterferenceModel> interference_;
  blockage::BlockageResult blockage_;
  double pb_;
};

}  // namespace spatspec

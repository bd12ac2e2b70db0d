#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "osdm/fbp.hpp"
#include "osdm/lowdose.hpp"
#include "osdm/sampler.hpp"
#include "osdm/sart.hpp"
#include "osdm/scorenet.hpp"
#include "osdm/types.hpp"

namespace osdm {

struct ConfigKey {
  const char* name;
  const char* units;
  const char* default_value;
  const char* description;
};

// Every recognized flat key with its units and default; unknown keys in a
// config file are rejected. phantom.ellipse.<i> keys are dynamic.
const std::vector<ConfigKey>& config_key_table();
std::string config_help_text();

class RunConfig {
 public:
  RunConfig() = default;  // defaults only
  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_lines(const std::vector<std::string>& lines);

  double number(const std::string& key) const;
  std::string text(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::uint64_t seed() const;
  void override_seed(std::uint64_t s) { seed_override_ = true; seed_ = s; }

  FanBeamGeometry geometry() const;
  int grid_width() const;
  int grid_height() const;
  double pixel_size() const;
  EllipsePhantom phantom() const;
  PhotonModel photon_model() const;
  SigmaSchedule schedule() const;
  TrainConfig train_config() const;
  int hidden_channels() const;
  ReconConfig recon_config() const;
  FilterSpec filter_spec() const;
  SartParams sart_params() const;
  double target_log_max() const { return number("sim.target_log_max"); }
  double mu_water() const { return number("export.mu_water"); }

 private:
  std::map<std::string, std::string> values_;
  bool seed_override_ = false;
  std::uint64_t seed_ = 0;
};

}  // namespace osdm

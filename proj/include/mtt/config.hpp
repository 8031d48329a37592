#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtt/bp.hpp"
#include "mtt/jpda.hpp"
#include "mtt/mht.hpp"
#include "mtt/scenario.hpp"

namespace mtt {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TrackerKind { kJpda, kMht, kBp };

std::string tracker_name(TrackerKind kind);

/// Every benchmark parameter, flat, with the reference defaults. The config
/// file mirrors these fields one key=value per line; CLI flags override.
struct RunConfig {
  // harness
  int scenario = 1;
  int runs = 1000;
  std::uint64_t seed = 1;
  std::string trackers = "jpda,mht,bp";
  int workers = 0;  // 0 = hardware concurrency

  // system model
  double T = 1.0;
  double sigma_u2 = 0.1;
  double p_s = 0.995;
  double p_d = 0.9;
  double sigma_v = 10.0;
  double mu_c = 10.0;
  double mu_b = 0.01;
  double gate_gamma = 13.82;

  // JPDA
  int jpda_confirm_m = 10;
  int jpda_confirm_n = 16;
  int jpda_max_missed = 13;
  double jpda_v_max = 50.0;
  double event_cap = 1e6;

  // MHT
  int mht_window = 5;
  int mht_confirm_m = 12;
  int mht_confirm_n = 24;
  int mht_max_missed = 13;
  int mht_leaf_cap = 300;
  double mht_search_cap = 1e6;
  double mht_birth_vel_std = 10.0;

  // BP
  int bp_particles = 5000;
  double bp_p_th = 0.5;
  double bp_p_pr = 1e-5;
  int bp_max_iter = 100;
  double bp_tol = 1e-6;
  double bp_damping = 0.0;
  double bp_birth_vel_std = 10.0;

  // metrics
  double gospa_p = 1.0;
  double gospa_c = 50.0;

  // scenario geometry
  int steps = 300;
  double geom_x_speed = 4.0;
  double geom_y_far = 105.0;
  double geom_y_near = 5.0;
  double geom_diverge_rate = 2.0;

  std::vector<TrackerKind> tracker_list() const;
  MotionModel motion_model() const;
  SensorModel sensor_model(const Rect& roi) const;
  JpdaConfig jpda_config() const;
  MhtConfig mht_config() const;
  BpConfig bp_config() const;
  ScenarioGeometry geometry() const;
};

/// Applies `key = value` lines from a flat UTF-8 config file onto `cfg`.
/// Unknown keys, malformed lines and out-of-range values raise ConfigError.
void parse_config_file(const std::string& path, RunConfig& cfg);
void parse_config_stream(std::istream& in, RunConfig& cfg);

/// Sets one key; shared by the file parser and CLI overrides.
void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value);

/// Writes every key so that parse(write(cfg)) == cfg.
void write_config(const RunConfig& cfg, std::ostream& out);

/// Range checks across all fields; throws ConfigError.
void validate(const RunConfig& cfg);

}  // namespace mtt

#include "mtt/config.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <variant>

namespace mtt {

std::string tracker_name(TrackerKind kind) {
  switch (kind) {
    case TrackerKind::kJpda: return "jpda";
    case TrackerKind::kMht: return "mht";
    case TrackerKind::kBp: return "bp";
  }
  return "?";
}

namespace {

using Member = std::variant<int RunConfig::*, double RunConfig::*,
                            std::uint64_t RunConfig::*,
                            std::string RunConfig::*>;

struct Field {
  const char* name;
  Member member;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"scenario", &RunConfig::scenario},
      {"runs", &RunConfig::runs},
      {"seed", &RunConfig::seed},
      {"trackers", &RunConfig::trackers},
      {"workers", &RunConfig::workers},
      {"T", &RunConfig::T},
      {"sigma_u2", &RunConfig::sigma_u2},
      {"p_s", &RunConfig::p_s},
      {"p_d", &RunConfig::p_d},
      {"sigma_v", &RunConfig::sigma_v},
      {"mu_c", &RunConfig::mu_c},
      {"mu_b", &RunConfig::mu_b},
      {"gate_gamma", &RunConfig::gate_gamma},
      {"jpda_confirm_m", &RunConfig::jpda_confirm_m},
      {"jpda_confirm_n", &RunConfig::jpda_confirm_n},
      {"jpda_max_missed", &RunConfig::jpda_max_missed},
      {"jpda_v_max", &RunConfig::jpda_v_max},
      {"event_cap", &RunConfig::event_cap},
      {"mht_window", &RunConfig::mht_window},
      {"mht_confirm_m", &RunConfig::mht_confirm_m},
      {"mht_confirm_n", &RunConfig::mht_confirm_n},
      {"mht_max_missed", &RunConfig::mht_max_missed},
      {"mht_leaf_cap", &RunConfig::mht_leaf_cap},
      {"mht_search_cap", &RunConfig::mht_search_cap},
      {"mht_birth_vel_std", &RunConfig::mht_birth_vel_std},
      {"bp_particles", &RunConfig::bp_particles},
      {"bp_p_th", &RunConfig::bp_p_th},
      {"bp_p_pr", &RunConfig::bp_p_pr},
      {"bp_max_iter", &RunConfig::bp_max_iter},
      {"bp_tol", &RunConfig::bp_tol},
      {"bp_damping", &RunConfig::bp_damping},
      {"bp_birth_vel_std", &RunConfig::bp_birth_vel_std},
      {"gospa_p", &RunConfig::gospa_p},
      {"gospa_c", &RunConfig::gospa_c},
      {"steps", &RunConfig::steps},
      {"geom_x_speed", &RunConfig::geom_x_speed},
      {"geom_y_far", &RunConfig::geom_y_far},
      {"geom_y_near", &RunConfig::geom_y_near},
      {"geom_diverge_rate", &RunConfig::geom_diverge_rate},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T result{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  std::from_chars_result r{};
  if constexpr (std::is_same_v<T, double>)
    r = std::from_chars(begin, end, result);
  else
    r = std::from_chars(begin, end, result, 10);
  if (r.ec != std::errc{} || r.ptr != end)
    throw ConfigError("config: bad value for '" + key + "': " + value);
  return result;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value) {
  for (const Field& f : fields()) {
    if (key != f.name) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, std::string>)
            cfg.*member = value;
          else
            cfg.*member = parse_number<T>(key, value);
        },
        f.member);
    return;
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

void parse_config_stream(std::istream& in, RunConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not key = value");
    set_config_value(cfg, trim(stripped.substr(0, eq)),
                     trim(stripped.substr(eq + 1)));
  }
  validate(cfg);
}

void parse_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  parse_config_stream(in, cfg);
}

void write_config(const RunConfig& cfg, std::ostream& out) {
  for (const Field& f : fields()) {
    out << f.name << " = ";
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", cfg.*member);
            out << buf;
          } else {
            out << cfg.*member;
          }
        },
        f.member);
    out << "\n";
  }
}

std::vector<TrackerKind> RunConfig::tracker_list() const {
  std::vector<TrackerKind> list;
  std::stringstream ss(trackers);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    TrackerKind kind;
    if (item == "jpda")
      kind = TrackerKind::kJpda;
    else if (item == "mht")
      kind = TrackerKind::kMht;
    else if (item == "bp")
      kind = TrackerKind::kBp;
    else
      throw ConfigError("config: unknown tracker '" + item + "'");
    if (std::find(list.begin(), list.end(), kind) == list.end())
      list.push_back(kind);
  }
  if (list.empty()) throw ConfigError("config: no trackers selected");
  return list;
}

MotionModel RunConfig::motion_model() const {
  return build_motion_model(T, sigma_u2, p_s);
}

SensorModel RunConfig::sensor_model(const Rect& roi) const {
  SensorModel sm;
  sm.p_d = p_d;
  sm.sigma_v = sigma_v;
  sm.mu_c = mu_c;
  sm.mu_b = mu_b;
  sm.roi = roi;
  return sm;
}

JpdaConfig RunConfig::jpda_config() const {
  JpdaConfig c;
  c.gate_gamma = gate_gamma;
  c.confirm_m = jpda_confirm_m;
  c.confirm_n = jpda_confirm_n;
  c.max_missed = jpda_max_missed;
  c.v_max = jpda_v_max;
  c.event_cap = static_cast<std::size_t>(event_cap);
  return c;
}

MhtConfig RunConfig::mht_config() const {
  MhtConfig c;
  c.gate_gamma = gate_gamma;
  c.window = mht_window;
  c.confirm_m = mht_confirm_m;
  c.confirm_n = mht_confirm_n;
  c.max_missed = mht_max_missed;
  c.leaf_cap = mht_leaf_cap;
  c.search_cap = static_cast<std::size_t>(mht_search_cap);
  c.birth_vel_std = mht_birth_vel_std;
  return c;
}

BpConfig RunConfig::bp_config() const {
  BpConfig c;
  c.particle_count = bp_particles;
  c.p_th = bp_p_th;
  c.p_pr = bp_p_pr;
  c.bp_max_iter = bp_max_iter;
  c.bp_tol = bp_tol;
  c.bp_damping = bp_damping;
  c.birth_vel_std = bp_birth_vel_std;
  c.gate_gamma = gate_gamma;
  return c;
}

ScenarioGeometry RunConfig::geometry() const {
  ScenarioGeometry g;
  g.steps = steps;
  g.x_speed = geom_x_speed;
  g.y_far = geom_y_far;
  g.y_near = geom_y_near;
  g.diverge_rate = geom_diverge_rate;
  return g;
}

void validate(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  auto prob = [&](double v, const char* name, bool allow_one) {
    if (!(v > 0) || v > 1 || (!allow_one && v == 1))
      fail(std::string(name) + " must be a probability");
  };
  if (cfg.scenario < 1 || cfg.scenario > 3) fail("scenario must be 1, 2 or 3");
  if (cfg.runs < 1) fail("runs must be >= 1");
  if (cfg.workers < 0) fail("workers must be >= 0");
  if (!(cfg.T > 0)) fail("T must be > 0");
  if (cfg.sigma_u2 < 0) fail("sigma_u2 must be >= 0");
  prob(cfg.p_s, "p_s", true);
  prob(cfg.p_d, "p_d", true);
  if (!(cfg.sigma_v > 0)) fail("sigma_v must be > 0");
  if (cfg.mu_c < 0) fail("mu_c must be >= 0");
  if (cfg.mu_b < 0) fail("mu_b must be >= 0");
  if (!(cfg.gate_gamma > 0)) fail("gate_gamma must be > 0");
  if (cfg.jpda_confirm_m < 1 || cfg.jpda_confirm_m > cfg.jpda_confirm_n)
    fail("jpda confirmation must satisfy 1 <= M <= N");
  if (cfg.jpda_max_missed < 1) fail("jpda_max_missed must be >= 1");
  if (!(cfg.jpda_v_max > 0)) fail("jpda_v_max must be > 0");
  if (cfg.event_cap < 1) fail("event_cap must be >= 1");
  if (cfg.mht_window < 1) fail("mht_window must be >= 1");
  if (cfg.mht_confirm_m < 1 || cfg.mht_confirm_m > cfg.mht_confirm_n)
    fail("mht confirmation must satisfy 1 <= M <= N");
  if (cfg.mht_confirm_n > 64) fail("mht_confirm_n must be <= 64");
  if (cfg.mht_max_missed < 1) fail("mht_max_missed must be >= 1");
  if (cfg.mht_leaf_cap < 1) fail("mht_leaf_cap must be >= 1");
  if (cfg.mht_search_cap < 1) fail("mht_search_cap must be >= 1");
  if (!(cfg.mht_birth_vel_std > 0)) fail("mht_birth_vel_std must be > 0");
  if (cfg.bp_particles < 1) fail("bp_particles must be >= 1");
  if (!(cfg.bp_p_pr > 0) || !(cfg.bp_p_pr < cfg.bp_p_th) || cfg.bp_p_th >= 1)
    fail("bp thresholds must satisfy 0 < P_pr < P_th < 1");
  if (cfg.bp_max_iter < 1) fail("bp_max_iter must be >= 1");
  if (!(cfg.bp_tol > 0)) fail("bp_tol must be > 0");
  if (cfg.bp_damping < 0 || cfg.bp_damping >= 1)
    fail("bp_damping must be in [0, 1)");
  if (!(cfg.bp_birth_vel_std > 0)) fail("bp_birth_vel_std must be > 0");
  if (!(cfg.gospa_p >= 1)) fail("gospa_p must be >= 1");
  if (!(cfg.gospa_c > 0)) fail("gospa_c must be > 0");
  if (cfg.steps < 3) fail("steps must be >= 3");
  if (!(cfg.geom_x_speed > 0) || !(cfg.geom_y_far > cfg.geom_y_near) ||
      !(cfg.geom_y_near > 0) || !(cfg.geom_diverge_rate > 0))
    fail("scenario geometry out of range");
  cfg.tracker_list();
}

}  // namespace mtt

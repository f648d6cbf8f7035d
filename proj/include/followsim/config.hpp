#pragma once

// Scenario configuration: a human-readable key-value file with [section]
// headers. Keys may also be written as bare dotted paths before any section
// header. Later assignments override earlier ones, so a calibration fragment
// can simply be appended to a scenario file. An empty file is the default
// scenario. Unknown keys are errors.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "followsim/bench.hpp"
#include "followsim/camera.hpp"
#include "followsim/detection.hpp"
#include "followsim/navigation.hpp"
#include "followsim/servo.hpp"
#include "followsim/simworld.hpp"

namespace followsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LatencySelection {
  enum class Mode { BUILTIN, CONSTANT, LOGNORMAL };
  Mode mode = Mode::BUILTIN;  // BUILTIN resolves by backend name
  double constant_s = 0.0;
  double log_mu = 0.0;
  double log_sigma = 0.0;
};

// Field units mirror the file keys (degrees stay degrees) so that
// parse/emit round-trips are exact; the accessors below build the typed
// module structs.
struct ScenarioConfig {
  // [camera]
  double hfov_deg = 90.0;
  double aspect = 4.0 / 3.0;
  double mount_height_m = 0.15;
  double pitch_deg = -20.0;
  double min_box_area = 1e-4;
  // [target]
  TargetShape shape;
  TargetPoint point;
  double standoff_m = 2.0;
  // [detector]
  Backend backend = Backend::PERFECT;
  double center_jitter = 0.01;
  double size_jitter = 0.02;
  double miss_prob = 0.02;
  LatencySelection latency;
  // [nav]
  BracketConfig brackets;
  ActionTable actions;
  int hysteresis = 1;
  // [servo.steering], [servo.throttle]
  ServoCalibration servo;
  // [vehicle]
  double wheelbase_m = 0.16;
  double max_steer_deg = 30.0;
  double max_speed_mps = 1.5;
  // [sim]
  double period_s = 1.0 / 15.0;
  double duration_s = 30.0;
  std::uint64_t seed = 1;
  double start_x = 0.0;
  double start_y = 0.0;
  double start_heading_deg = 0.0;
  // [trajectory]
  TargetTrajectory trajectory;

  CameraIntrinsics camera() const {
    return CameraIntrinsics{deg_to_rad(hfov_deg), aspect, mount_height_m,
                            deg_to_rad(pitch_deg), min_box_area};
  }
  VehicleParams vehicle() const {
    return VehicleParams{wheelbase_m, deg_to_rad(max_steer_deg), max_speed_mps};
  }
  Pose start_pose() const {
    return Pose{start_x, start_y, normalize_angle(deg_to_rad(start_heading_deg))};
  }

  // Detector model with the latency profile resolved. PERFECT ignores the
  // noise and latency keys by definition.
  DetectorModel detector() const {
    LatencyProfile profile = LatencyProfile::constant("none", 0.0);
    switch (latency.mode) {
      case LatencySelection::Mode::BUILTIN:
        profile = backend == Backend::PERFECT
                      ? LatencyProfile::constant("PERFECT", 0.0)
                      : builtin_profile(backend_name(backend));
        break;
      case LatencySelection::Mode::CONSTANT:
        profile = LatencyProfile::constant(backend_name(backend),
                                           latency.constant_s);
        break;
      case LatencySelection::Mode::LOGNORMAL:
        profile = LatencyProfile::lognormal(backend_name(backend),
                                            latency.log_mu, latency.log_sigma);
        break;
    }
    return make_detector(backend, center_jitter, size_jitter, miss_prob,
                         std::move(profile));
  }

  void validate() const {
    camera().validate();
    shape.validate();
    if (!(point.cx >= 0.0 && point.cx <= 1.0 && point.cy >= 0.0 &&
          point.cy <= 1.0))
      throw ConfigError("target.point_cx/point_cy must be in [0, 1]");
    if (!(standoff_m > 0.0))
      throw ConfigError("target.standoff_m must be positive");
    try {
      detector();
      brackets.validate();
      actions.validate();
      servo.validate();
      vehicle().validate();
      trajectory.validate();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (hysteresis < 1) throw ConfigError("nav.hysteresis must be >= 1");
    if (!(period_s > 0.0)) throw ConfigError("sim.period_s must be positive");
    if (!(duration_s >= period_s))
      throw ConfigError("sim.duration_s must be at least one period");
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawConfig {
  std::string origin;
  std::map<std::string, RawEntry> entries;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  double take_double(const std::string& key, double fallback) {
    auto raw = take(key);
    if (!raw) return fallback;
    const std::string s = *raw;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      fail(entries.at(key).line, "key \"" + key + "\": not a number: \"" + s + "\"");
    return v;
  }

  long long take_int(const std::string& key, long long fallback) {
    auto raw = take(key);
    if (!raw) return fallback;
    const std::string s = *raw;
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      fail(entries.at(key).line, "key \"" + key + "\": not an integer: \"" + s + "\"");
    return v;
  }
};

inline RawConfig parse_raw(const std::string& text, const std::string& origin) {
  RawConfig raw;
  raw.origin = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') raw.fail(lineno, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) raw.fail(lineno, "empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      raw.fail(lineno, "expected key = value, got \"" + t + "\"");
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) raw.fail(lineno, "empty key");
    if (!section.empty()) key = section + "." + key;
    raw.entries[key] = RawEntry{value, lineno, false};  // last wins
  }
  return raw;
}

inline std::vector<Waypoint> parse_waypoints(const std::string& s,
                                             RawConfig& raw, int line) {
  std::vector<Waypoint> wps;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ';')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    double v[3];
    std::istringstream fields(t);
    std::string f;
    int i = 0;
    while (std::getline(fields, f, ',')) {
      if (i >= 3) break;
      try {
        v[i] = std::stod(trim(f));
      } catch (const std::exception&) {
        raw.fail(line, "trajectory.waypoints: bad number in \"" + t + "\"");
      }
      ++i;
    }
    if (i != 3)
      raw.fail(line, "trajectory.waypoints: expected t,x,y triple in \"" + t + "\"");
    wps.push_back(Waypoint{v[0], {v[1], v[2]}});
  }
  return wps;
}

}  // namespace detail

inline ScenarioConfig parse_config(const std::string& text,
                                   const std::string& origin = "<config>") {
  using detail::RawConfig;
  RawConfig raw = detail::parse_raw(text, origin);
  ScenarioConfig cfg;

  cfg.hfov_deg = raw.take_double("camera.hfov_deg", cfg.hfov_deg);
  cfg.aspect = raw.take_double("camera.aspect", cfg.aspect);
  cfg.mount_height_m =
      raw.take_double("camera.mount_height_m", cfg.mount_height_m);
  cfg.pitch_deg = raw.take_double("camera.pitch_deg", cfg.pitch_deg);
  cfg.min_box_area = raw.take_double("camera.min_box_area", cfg.min_box_area);

  cfg.shape.height_m = raw.take_double("target.height_m", cfg.shape.height_m);
  cfg.shape.width_m = raw.take_double("target.width_m", cfg.shape.width_m);
  cfg.point.cx = raw.take_double("target.point_cx", cfg.point.cx);
  cfg.point.cy = raw.take_double("target.point_cy", cfg.point.cy);
  cfg.standoff_m = raw.take_double("target.standoff_m", cfg.standoff_m);

  if (auto b = raw.take("detector.backend")) {
    try {
      cfg.backend = parse_backend(*b);
    } catch (const std::exception& e) {
      raw.fail(raw.entries.at("detector.backend").line, e.what());
    }
  }
  cfg.center_jitter =
      raw.take_double("detector.center_jitter", cfg.center_jitter);
  cfg.size_jitter = raw.take_double("detector.size_jitter", cfg.size_jitter);
  cfg.miss_prob = raw.take_double("detector.miss_prob", cfg.miss_prob);
  if (auto l = raw.take("detector.latency")) {
    const int line = raw.entries.at("detector.latency").line;
    const std::string s = *l;
    if (s == "builtin") {
      cfg.latency.mode = LatencySelection::Mode::BUILTIN;
    } else if (s.rfind("constant:", 0) == 0) {
      cfg.latency.mode = LatencySelection::Mode::CONSTANT;
      try {
        cfg.latency.constant_s = std::stod(s.substr(9));
      } catch (const std::exception&) {
        raw.fail(line, "detector.latency: bad constant value in \"" + s + "\"");
      }
    } else if (s.rfind("lognormal:", 0) == 0) {
      cfg.latency.mode = LatencySelection::Mode::LOGNORMAL;
      const std::string rest = s.substr(10);
      const auto comma = rest.find(',');
      if (comma == std::string::npos)
        raw.fail(line, "detector.latency: expected lognormal:mu,sigma");
      try {
        cfg.latency.log_mu = std::stod(rest.substr(0, comma));
        cfg.latency.log_sigma = std::stod(rest.substr(comma + 1));
      } catch (const std::exception&) {
        raw.fail(line, "detector.latency: bad lognormal parameters in \"" + s + "\"");
      }
    } else {
      raw.fail(line,
               "detector.latency: expected builtin, constant:<s> or "
               "lognormal:<mu>,<sigma>");
    }
  }

  cfg.brackets.x_thr = raw.take_double("nav.x_thr", cfg.brackets.x_thr);
  cfg.brackets.y_fwd_thr =
      raw.take_double("nav.y_fwd_thr", cfg.brackets.y_fwd_thr);
  cfg.brackets.y_rev_thr =
      raw.take_double("nav.y_rev_thr", cfg.brackets.y_rev_thr);
  cfg.actions.steer_mag = raw.take_double("nav.steer_mag", cfg.actions.steer_mag);
  cfg.actions.fwd_throttle =
      raw.take_double("nav.fwd_throttle", cfg.actions.fwd_throttle);
  cfg.actions.rev_throttle =
      raw.take_double("nav.rev_throttle", cfg.actions.rev_throttle);
  cfg.hysteresis =
      static_cast<int>(raw.take_int("nav.hysteresis", cfg.hysteresis));

  auto channel = [&raw](const std::string& prefix, ChannelCalibration& ch) {
    ch.min_duty = raw.take_double(prefix + ".min", ch.min_duty);
    ch.mid_duty = raw.take_double(prefix + ".mid", ch.mid_duty);
    ch.max_duty = raw.take_double(prefix + ".max", ch.max_duty);
    ch.polarity =
        static_cast<int>(raw.take_int(prefix + ".polarity", ch.polarity));
  };
  channel("servo.steering", cfg.servo.steering);
  channel("servo.throttle", cfg.servo.throttle);

  cfg.wheelbase_m = raw.take_double("vehicle.wheelbase_m", cfg.wheelbase_m);
  cfg.max_steer_deg =
      raw.take_double("vehicle.max_steer_deg", cfg.max_steer_deg);
  cfg.max_speed_mps =
      raw.take_double("vehicle.max_speed_mps", cfg.max_speed_mps);

  cfg.period_s = raw.take_double("sim.period_s", cfg.period_s);
  cfg.duration_s = raw.take_double("sim.duration_s", cfg.duration_s);
  cfg.seed = static_cast<std::uint64_t>(
      raw.take_int("sim.seed", static_cast<long long>(cfg.seed)));
  cfg.start_x = raw.take_double("sim.start_x", cfg.start_x);
  cfg.start_y = raw.take_double("sim.start_y", cfg.start_y);
  cfg.start_heading_deg =
      raw.take_double("sim.start_heading_deg", cfg.start_heading_deg);

  if (auto k = raw.take("trajectory.kind")) {
    const int line = raw.entries.at("trajectory.kind").line;
    if (*k == "stationary") {
      cfg.trajectory.kind = TrajectoryKind::STATIONARY;
    } else if (*k == "waypoints") {
      cfg.trajectory.kind = TrajectoryKind::WAYPOINTS;
    } else if (*k == "line") {
      cfg.trajectory.kind = TrajectoryKind::PARAMETRIC;
      cfg.trajectory.param.curve = CurveKind::LINE;
    } else if (*k == "circle") {
      cfg.trajectory.kind = TrajectoryKind::PARAMETRIC;
      cfg.trajectory.param.curve = CurveKind::CIRCLE;
    } else {
      raw.fail(line,
               "trajectory.kind: expected stationary, waypoints, line or circle");
    }
  }
  cfg.trajectory.point.x = raw.take_double("trajectory.x", cfg.trajectory.point.x);
  cfg.trajectory.point.y = raw.take_double("trajectory.y", cfg.trajectory.point.y);
  if (auto w = raw.take("trajectory.waypoints"))
    cfg.trajectory.waypoints = detail::parse_waypoints(
        *w, raw, raw.entries.at("trajectory.waypoints").line);
  cfg.trajectory.param.start.x =
      raw.take_double("trajectory.start_x", cfg.trajectory.param.start.x);
  cfg.trajectory.param.start.y =
      raw.take_double("trajectory.start_y", cfg.trajectory.param.start.y);
  cfg.trajectory.param.velocity.x =
      raw.take_double("trajectory.vel_x", cfg.trajectory.param.velocity.x);
  cfg.trajectory.param.velocity.y =
      raw.take_double("trajectory.vel_y", cfg.trajectory.param.velocity.y);
  cfg.trajectory.param.center.x =
      raw.take_double("trajectory.center_x", cfg.trajectory.param.center.x);
  cfg.trajectory.param.center.y =
      raw.take_double("trajectory.center_y", cfg.trajectory.param.center.y);
  cfg.trajectory.param.radius_m =
      raw.take_double("trajectory.radius_m", cfg.trajectory.param.radius_m);
  cfg.trajectory.param.angular_speed_rad_s = raw.take_double(
      "trajectory.angular_speed_rad_s", cfg.trajectory.param.angular_speed_rad_s);
  cfg.trajectory.param.phase_rad =
      raw.take_double("trajectory.phase_rad", cfg.trajectory.param.phase_rad);

  for (const auto& [key, entry] : raw.entries)
    if (!entry.used) raw.fail(entry.line, "unknown key \"" + key + "\"");

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

inline std::string emit_config(const ScenarioConfig& cfg) {
  using detail::format_double;
  std::ostringstream out;
  auto kv = [&out](const std::string& k, const std::string& v) {
    out << k << " = " << v << "\n";
  };
  auto kd = [&](const std::string& k, double v) { kv(k, format_double(v)); };

  out << "[camera]\n";
  kd("hfov_deg", cfg.hfov_deg);
  kd("aspect", cfg.aspect);
  kd("mount_height_m", cfg.mount_height_m);
  kd("pitch_deg", cfg.pitch_deg);
  kd("min_box_area", cfg.min_box_area);

  out << "\n[target]\n";
  kd("height_m", cfg.shape.height_m);
  kd("width_m", cfg.shape.width_m);
  kd("point_cx", cfg.point.cx);
  kd("point_cy", cfg.point.cy);
  kd("standoff_m", cfg.standoff_m);

  out << "\n[detector]\n";
  kv("backend", backend_name(cfg.backend));
  kd("center_jitter", cfg.center_jitter);
  kd("size_jitter", cfg.size_jitter);
  kd("miss_prob", cfg.miss_prob);
  switch (cfg.latency.mode) {
    case LatencySelection::Mode::BUILTIN:
      kv("latency", "builtin");
      break;
    case LatencySelection::Mode::CONSTANT:
      kv("latency", "constant:" + format_double(cfg.latency.constant_s));
      break;
    case LatencySelection::Mode::LOGNORMAL:
      kv("latency", "lognormal:" + format_double(cfg.latency.log_mu) + "," +
                        format_double(cfg.latency.log_sigma));
      break;
  }

  out << "\n[nav]\n";
  kd("x_thr", cfg.brackets.x_thr);
  kd("y_fwd_thr", cfg.brackets.y_fwd_thr);
  kd("y_rev_thr", cfg.brackets.y_rev_thr);
  kd("steer_mag", cfg.actions.steer_mag);
  kd("fwd_throttle", cfg.actions.fwd_throttle);
  kd("rev_throttle", cfg.actions.rev_throttle);
  kv("hysteresis", std::to_string(cfg.hysteresis));

  auto channel = [&](const std::string& name, const ChannelCalibration& ch) {
    out << "\n[servo." << name << "]\n";
    kd("min", ch.min_duty);
    kd("mid", ch.mid_duty);
    kd("max", ch.max_duty);
    kv("polarity", std::to_string(ch.polarity));
  };
  channel("steering", cfg.servo.steering);
  channel("throttle", cfg.servo.throttle);

  out << "\n[vehicle]\n";
  kd("wheelbase_m", cfg.wheelbase_m);
  kd("max_steer_deg", cfg.max_steer_deg);
  kd("max_speed_mps", cfg.max_speed_mps);

  out << "\n[sim]\n";
  kd("period_s", cfg.period_s);
  kd("duration_s", cfg.duration_s);
  kv("seed", std::to_string(cfg.seed));
  kd("start_x", cfg.start_x);
  kd("start_y", cfg.start_y);
  kd("start_heading_deg", cfg.start_heading_deg);

  out << "\n[trajectory]\n";
  switch (cfg.trajectory.kind) {
    case TrajectoryKind::STATIONARY:
      kv("kind", "stationary");
      kd("x", cfg.trajectory.point.x);
      kd("y", cfg.trajectory.point.y);
      break;
    case TrajectoryKind::WAYPOINTS: {
      kv("kind", "waypoints");
      std::string joined;
      for (const auto& w : cfg.trajectory.waypoints) {
        if (!joined.empty()) joined += "; ";
        joined += format_double(w.t) + "," + format_double(w.p.x) + "," +
                  format_double(w.p.y);
      }
      kv("waypoints", joined);
      break;
    }
    case TrajectoryKind::PARAMETRIC:
      if (cfg.trajectory.param.curve == CurveKind::LINE) {
        kv("kind", "line");
        kd("start_x", cfg.trajectory.param.start.x);
        kd("start_y", cfg.trajectory.param.start.y);
        kd("vel_x", cfg.trajectory.param.velocity.x);
        kd("vel_y", cfg.trajectory.param.velocity.y);
      } else {
        kv("kind", "circle");
        kd("center_x", cfg.trajectory.param.center.x);
        kd("center_y", cfg.trajectory.param.center.y);
        kd("radius_m", cfg.trajectory.param.radius_m);
        kd("angular_speed_rad_s", cfg.trajectory.param.angular_speed_rad_s);
        kd("phase_rad", cfg.trajectory.param.phase_rad);
      }
      break;
  }
  return out.str();
}

// Loads and parses a config file. A missing or unreadable file is an I/O
// error (std::ios_base::failure), not a ConfigError.
inline ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::ios_base::failure("cannot open config file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad())
    throw std::ios_base::failure("error reading config file \"" + path + "\"");
  return parse_config(buf.str(), path);
}

}  // namespace followsim

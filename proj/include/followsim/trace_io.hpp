#pragma once

// JSON serialization for episode traces and metrics. Traces are written as
// JSON Lines, one record per control tick, with keys in a fixed order so
// identical runs produce byte-identical files.

#include <cstdint>
#include <map>
#include <ostream>
#include <string>

#include <json.hpp>

#include "followsim/runner.hpp"

namespace followsim {

using json = nlohmann::ordered_json;

inline json bbox_to_json(const BoundingBox& b) {
  return json{{"x_min", b.x_min},
              {"y_min", b.y_min},
              {"x_max", b.x_max},
              {"y_max", b.y_max}};
}

inline json trace_record_to_json(const TraceRecord& r) {
  json j;
  j["tick"] = r.tick;
  j["t"] = r.t;
  j["follower"] = json{{"x", r.follower.x},
                       {"y", r.follower.y},
                       {"heading", r.follower.heading}};
  j["target"] = json{{"x", r.target.x}, {"y", r.target.y}};
  j["truth_box"] = r.truth_box ? bbox_to_json(*r.truth_box) : json(nullptr);
  if (r.detection) {
    json d;
    d["box"] = bbox_to_json(r.detection->box);
    d["confidence"] = r.detection->confidence;
    d["frame"] = r.detection->frame;
    j["detection"] = d;
  } else {
    j["detection"] = nullptr;
  }
  j["inference_s"] = r.inference_s ? json(*r.inference_s) : json(nullptr);
  j["delta"] = json{
      {"dx", r.delta.dx}, {"dy", r.delta.dy}, {"detected", r.delta.detected}};
  j["case"] = r.case_id;
  j["action"] = json{{"steering", r.action.steering},
                     {"throttle", r.action.throttle}};
  j["servo"] = json{{"steering_duty", r.servo.steering_duty},
                    {"throttle_duty", r.servo.throttle_duty}};
  return j;
}

inline void write_trace_jsonl(std::ostream& os,
                              const std::vector<TraceRecord>& trace) {
  for (const auto& r : trace) os << trace_record_to_json(r).dump() << '\n';
}

inline json metrics_to_json(const Metrics& m) {
  json j;
  j["ticks"] = m.ticks;
  j["in_fov_fraction"] = m.in_fov_fraction;
  j["mean_abs_dx"] = m.mean_abs_dx ? json(*m.mean_abs_dx) : json(nullptr);
  j["mean_abs_dy"] = m.mean_abs_dy ? json(*m.mean_abs_dy) : json(nullptr);
  j["max_abs_dx"] = m.max_abs_dx ? json(*m.max_abs_dx) : json(nullptr);
  j["max_abs_dy"] = m.max_abs_dy ? json(*m.max_abs_dy) : json(nullptr);
  j["time_to_converge_s"] =
      m.time_to_converge_s ? json(*m.time_to_converge_s) : json(nullptr);
  j["final_standoff_m"] = m.final_standoff_m;
  j["case_transitions"] = m.case_transitions;
  return j;
}

inline json episode_summary_json(const EpisodeResult& result) {
  json j;
  j["metrics"] = metrics_to_json(result.metrics);
  json pubs;
  for (const auto& [topic, count] : result.bus_publishes) pubs[topic] = count;
  j["bus_publishes"] = pubs;
  return j;
}

}  // namespace followsim

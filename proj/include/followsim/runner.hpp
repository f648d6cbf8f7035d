#pragma once

// Episode engine. Wires the four pipeline stages over the message bus and
// integrates the vehicle.
//
// Timing model: the camera publishes a frame every control period. The
// detector starts a job only when idle and only on a tick boundary, always
// on the newest frame; the result of the job started on frame k becomes
// visible (and its action takes effect) at sim time k * period +
// inference_time, with the previous action held until then. Frames arriving
// while the detector is busy are never processed; their trace records carry
// no detection.
//
// Deterministic mode runs the stages inline in a fixed order, so a seed
// fully determines the trace. Concurrent mode runs detection, navigation
// and servo on their own threads, synchronized per tick with a barrier but
// unordered within the tick; the bus carries all cross-stage traffic.

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "followsim/config.hpp"
#include "followsim/msgbus.hpp"
#include "followsim/simworld.hpp"

namespace followsim {

enum class ExecMode { DETERMINISTIC, CONCURRENT };

inline ExecMode parse_exec_mode(const std::string& s) {
  if (s == "deterministic") return ExecMode::DETERMINISTIC;
  if (s == "concurrent") return ExecMode::CONCURRENT;
  throw std::invalid_argument("mode must be deterministic or concurrent");
}

struct EpisodeResult {
  std::vector<TraceRecord> trace;
  Metrics metrics;
  std::map<std::string, std::uint64_t> bus_publishes;
};

namespace detail {

class DetectionStage {
 public:
  DetectionStage(DetectorModel model, TargetPoint point, std::uint64_t seed)
      : model_(std::move(model)), point_(point), rng_(seed) {}

  struct Completion {
    double ready_at = 0.0;
    double inference_s = 0.0;
    std::optional<Detection> detection;
  };

  // One tick: start a job if idle, then release a finished job into the bus
  // if it completes inside [t0, t1).
  void step(MessageBus& bus, double t0, double t1) {
    if (!pending_ && busy_until_ <= t0 + 1e-12) {
      if (auto env = bus.poll_latest(std::string(kTopicCameraFrame))) {
        const auto& frame = std::get<CameraFrame>(env->payload);
        if (!started_frame_ || frame.frame != *started_frame_) {
          started_frame_ = frame.frame;
          DetectionOutcome out =
              run_detector(frame.truth_box, model_, rng_, frame.frame);
          pending_ = Completion{t0 + out.inference_s, out.inference_s,
                                std::move(out.detection)};
          busy_until_ = pending_->ready_at;
        }
      }
    }
    if (pending_ && pending_->ready_at < t1) {
      const double at = pending_->ready_at;
      if (pending_->detection)
        bus.publish(std::string(kTopicDetectionBox), *pending_->detection, at);
      bus.publish(std::string(kTopicDetectionDelta),
                  compute_delta(pending_->detection, point_), at);
      completed_ = std::move(pending_);
      pending_.reset();
    }
  }

  std::optional<Completion> take_completion() {
    auto c = std::move(completed_);
    completed_.reset();
    return c;
  }

 private:
  DetectorModel model_;
  TargetPoint point_;
  Rng rng_;
  double busy_until_ = 0.0;
  std::optional<std::uint64_t> started_frame_;
  std::optional<Completion> pending_;
  std::optional<Completion> completed_;
};

class NavigationStage {
 public:
  NavigationStage(BracketConfig brackets, ActionTable table, int hysteresis)
      : navigator_(brackets, table, hysteresis) {}

  void step(MessageBus& bus) {
    auto env = bus.poll_latest(std::string(kTopicDetectionDelta));
    if (!env || env->sequence == seen_) return;
    seen_ = env->sequence;
    const auto& delta = std::get<DetectionDelta>(env->payload);
    bus.publish(std::string(kTopicNavAction), navigator_.step(delta),
                env->timestamp);
  }

 private:
  Navigator navigator_;
  std::uint64_t seen_ = 0;
};

class ServoStage {
 public:
  explicit ServoStage(ServoCalibration cal) : cal_(cal) {}

  void step(MessageBus& bus) {
    auto env = bus.poll_latest(std::string(kTopicNavAction));
    if (!env || env->sequence == seen_) return;
    seen_ = env->sequence;
    const auto& cmd = std::get<ActionCommand>(env->payload);
    bus.publish(std::string(kTopicServoSetting), apply_action(cmd, cal_),
                env->timestamp);
  }

 private:
  ServoCalibration cal_;
  std::uint64_t seen_ = 0;
};

}  // namespace detail

inline EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t seed,
                                 ExecMode mode = ExecMode::DETERMINISTIC) {
  cfg.validate();
  const CameraIntrinsics cam = cfg.camera();
  const VehicleParams vp = cfg.vehicle();
  const ServoCalibration servo_cal = cfg.servo;
  const double period = cfg.period_s;
  const auto ticks =
      static_cast<std::uint64_t>(std::llround(cfg.duration_s / period));

  MessageBus bus;
  register_standard_topics(bus);
  detail::DetectionStage detection(cfg.detector(), cfg.point, seed);
  detail::NavigationStage navigation(cfg.brackets, cfg.actions, cfg.hysteresis);
  detail::ServoStage servo(servo_cal);

  // Controller state in effect while the world integrates.
  struct Effective {
    DetectionDelta delta;
    ActionCommand action;
    ServoSetting setting;
    double steer_rad = 0.0;
    double speed = 0.0;
  };
  Effective current;
  current.setting = apply_action(current.action, servo_cal);
  std::uint64_t applied_seq = 0;

  auto refresh_effective = [&](const Envelope& servo_env) {
    if (auto denv = bus.poll_latest(std::string(kTopicDetectionDelta)))
      current.delta = std::get<DetectionDelta>(denv->payload);
    if (auto aenv = bus.poll_latest(std::string(kTopicNavAction)))
      current.action = std::get<ActionCommand>(aenv->payload);
    current.setting = std::get<ServoSetting>(servo_env.payload);
    // Positive steering command means turn right, which is a negative
    // heading rate in world coordinates.
    current.steer_rad =
        -duty_to_action(current.setting.steering_duty, servo_cal.steering) *
        vp.max_steer_rad;
    current.speed =
        duty_to_action(current.setting.throttle_duty, servo_cal.throttle) *
        vp.max_speed_mps;
    applied_seq = servo_env.sequence;
  };

  Pose pose = cfg.start_pose();
  std::vector<TraceRecord> trace;
  trace.reserve(ticks);

  std::atomic<bool> done{false};
  double t0_shared = 0.0;
  double t1_shared = 0.0;
  const bool concurrent = mode == ExecMode::CONCURRENT;

  // Each worker runs one stage once per tick, fenced by the barrier: the
  // driver arrives after publishing the tick's frame and again after the
  // stages finish, so stage outputs are visible when the driver integrates.
  // The loop body lambda is copied into each thread; only objects that
  // outlive the join are captured by reference.
  std::optional<std::barrier<>> sync;
  std::vector<std::thread> workers;
  auto stage_loop = [&sync, &done](auto body) {
    while (true) {
      sync->arrive_and_wait();  // driver published this tick's frame
      if (done.load(std::memory_order_acquire)) return;
      body();
      sync->arrive_and_wait();  // outputs visible to the driver
    }
  };
  if (concurrent) {
    sync.emplace(4);
    workers.emplace_back([&, stage_loop] {
      stage_loop([&] { detection.step(bus, t0_shared, t1_shared); });
    });
    workers.emplace_back(
        [&, stage_loop] { stage_loop([&] { navigation.step(bus); }); });
    workers.emplace_back(
        [&, stage_loop] { stage_loop([&] { servo.step(bus); }); });
  }

  for (std::uint64_t k = 0; k < ticks; ++k) {
    const double t0 = static_cast<double>(k) * period;
    const double t1 = static_cast<double>(k + 1) * period;

    const Vec2 target = target_position(cfg.trajectory, t0);
    const auto truth = project_target(pose, target, cfg.shape, cam);
    bus.publish(std::string(kTopicCameraFrame), CameraFrame{k, truth}, t0);

    if (concurrent) {
      t0_shared = t0;
      t1_shared = t1;
      sync->arrive_and_wait();
      sync->arrive_and_wait();
    } else {
      detection.step(bus, t0, t1);
      navigation.step(bus);
      servo.step(bus);
    }

    TraceRecord rec;
    rec.tick = k;
    rec.t = t0;
    rec.follower = pose;
    rec.target = target;
    rec.truth_box = truth;
    if (auto completion = detection.take_completion()) {
      rec.detection = completion->detection;
      rec.inference_s = completion->inference_s;
    }

    auto servo_env = bus.poll_latest(std::string(kTopicServoSetting));
    if (servo_env && servo_env->sequence != applied_seq) {
      const double switch_t = std::clamp(servo_env->timestamp, t0, t1);
      if (switch_t > t0)
        pose = step_kinematics(pose, current.steer_rad, current.speed, vp,
                               switch_t - t0);
      refresh_effective(*servo_env);
      if (t1 > switch_t)
        pose = step_kinematics(pose, current.steer_rad, current.speed, vp,
                               t1 - switch_t);
    } else {
      pose = step_kinematics(pose, current.steer_rad, current.speed, vp, period);
    }

    rec.delta = current.delta;
    rec.case_id = current.action.case_id;
    rec.action = current.action;
    rec.servo = current.setting;
    trace.push_back(rec);
  }

  if (concurrent) {
    done.store(true, std::memory_order_release);
    sync->arrive_and_wait();
    for (auto& w : workers) w.join();
  }

  EpisodeResult result;
  result.trace = std::move(trace);
  result.metrics = compute_metrics(result.trace);
  result.bus_publishes = bus.publish_counts();
  return result;
}

}  // namespace followsim

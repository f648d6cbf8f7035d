#pragma once

// Topic-based publish/subscribe bus with depth-1 latest-wins topics. A slow
// consumer simply misses intermediate messages; there is no queueing and no
// backpressure, matching how the four pipeline stages are coupled on the
// robot. Safe for concurrent publish/poll; messages are immutable values.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "followsim/camera.hpp"
#include "followsim/detection.hpp"
#include "followsim/navigation.hpp"
#include "followsim/servo.hpp"

namespace followsim {

enum class MessageKind {
  CameraFrame,
  Detection,
  DetectionDelta,
  ActionCommand,
  ServoSetting,
};

using Message = std::variant<CameraFrame, Detection, DetectionDelta,
                             ActionCommand, ServoSetting>;

inline MessageKind kind_of(const Message& m) {
  return static_cast<MessageKind>(m.index());
}

struct Envelope {
  std::uint64_t sequence = 0;  // per topic, starts at 1
  double timestamp = 0.0;      // non-decreasing per topic
  Message payload;
};

struct BusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The four pipeline stages communicate over these topics.
inline constexpr std::string_view kTopicCameraFrame = "camera/frame";
inline constexpr std::string_view kTopicDetectionBox = "detection/box";
inline constexpr std::string_view kTopicDetectionDelta = "detection/delta";
inline constexpr std::string_view kTopicNavAction = "nav/action";
inline constexpr std::string_view kTopicServoSetting = "servo/setting";

class MessageBus {
 public:
  void register_topic(const std::string& name, MessageKind kind) {
    std::lock_guard lock(mutex_);
    if (topics_.count(name))
      throw BusError("topic \"" + name + "\" already registered");
    topics_[name].kind = kind;
  }

  // Returns the stored envelope. Throws on unknown topic, payload kind
  // mismatch, or a timestamp earlier than the topic's latest.
  Envelope publish(const std::string& topic, Message payload, double now) {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(topic);
    if (it == topics_.end()) throw BusError("unknown topic \"" + topic + "\"");
    TopicState& state = it->second;
    if (kind_of(payload) != state.kind)
      throw BusError("message kind mismatch on topic \"" + topic + "\"");
    if (state.latest && now < state.latest->timestamp)
      throw BusError("timestamp regression on topic \"" + topic + "\"");
    state.latest = Envelope{state.next_sequence++, now, std::move(payload)};
    ++state.publish_count;
    return *state.latest;
  }

  // Latest envelope, or empty if nothing was published yet.
  std::optional<Envelope> poll_latest(const std::string& topic) const {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(topic);
    if (it == topics_.end()) throw BusError("unknown topic \"" + topic + "\"");
    return it->second.latest;
  }

  bool has_topic(const std::string& topic) const {
    std::lock_guard lock(mutex_);
    return topics_.count(topic) > 0;
  }

  std::uint64_t publish_count(const std::string& topic) const {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(topic);
    if (it == topics_.end()) throw BusError("unknown topic \"" + topic + "\"");
    return it->second.publish_count;
  }

  std::map<std::string, std::uint64_t> publish_counts() const {
    std::lock_guard lock(mutex_);
    std::map<std::string, std::uint64_t> counts;
    for (const auto& [name, state] : topics_) counts[name] = state.publish_count;
    return counts;
  }

 private:
  struct TopicState {
    MessageKind kind = MessageKind::CameraFrame;
    std::optional<Envelope> latest;
    std::uint64_t next_sequence = 1;
    std::uint64_t publish_count = 0;
  };

  mutable std::mutex mutex_;
  std::map<std::string, TopicState> topics_;
};

// Register the five standard pipeline topics.
inline void register_standard_topics(MessageBus& bus) {
  bus.register_topic(std::string(kTopicCameraFrame), MessageKind::CameraFrame);
  bus.register_topic(std::string(kTopicDetectionBox), MessageKind::Detection);
  bus.register_topic(std::string(kTopicDetectionDelta),
                     MessageKind::DetectionDelta);
  bus.register_topic(std::string(kTopicNavAction), MessageKind::ActionCommand);
  bus.register_topic(std::string(kTopicServoSetting),
                     MessageKind::ServoSetting);
}

}  // namespace followsim

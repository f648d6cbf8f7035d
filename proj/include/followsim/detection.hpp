#pragma once

// Object detector simulation. A backend wraps the ground-truth box with
// noise (center/size jitter, misses) and an inference-time draw from its
// latency profile. The PERFECT backend is the noise-free, zero-latency
// baseline.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "followsim/bench.hpp"
#include "followsim/camera.hpp"
#include "followsim/random.hpp"

namespace followsim {

enum class Backend { SSD, SSD_NCS, SSD_LITE, PERFECT };

inline const char* backend_name(Backend b) {
  switch (b) {
    case Backend::SSD: return "SSD";
    case Backend::SSD_NCS: return "SSD_NCS";
    case Backend::SSD_LITE: return "SSD_LITE";
    case Backend::PERFECT: return "PERFECT";
  }
  return "?";
}

inline Backend parse_backend(const std::string& name) {
  if (name == "SSD") return Backend::SSD;
  if (name == "SSD_NCS") return Backend::SSD_NCS;
  if (name == "SSD_LITE") return Backend::SSD_LITE;
  if (name == "PERFECT") return Backend::PERFECT;
  throw std::invalid_argument("unknown detector backend \"" + name + "\"");
}

struct Detection {
  BoundingBox box;
  double confidence = 1.0;
  double inference_s = 0.0;
  std::uint64_t frame = 0;
};

// Offset of the detected box center from the target point, image units,
// x rightward, y downward. detected == false forces dx == dy == 0 exactly:
// no detection means no correction, the vehicle holds still rather than
// acting on stale geometry.
struct DetectionDelta {
  double dx = 0.0;
  double dy = 0.0;
  bool detected = false;
};

// Where in the image the box center should sit.
struct TargetPoint {
  double cx = 0.5;
  double cy = 0.5;
};

struct DetectorModel {
  Backend backend = Backend::PERFECT;
  double center_jitter = 0.0;  // gaussian sigma on box center, image units
  double size_jitter = 0.0;    // gaussian sigma on box width/height
  double miss_prob = 0.0;      // probability a visible target is not detected
  LatencyProfile latency = LatencyProfile::constant("PERFECT", 0.0);

  void validate() const {
    if (!(center_jitter >= 0.0 && size_jitter >= 0.0))
      throw std::invalid_argument("detector: jitter sigmas must be >= 0");
    if (!(miss_prob >= 0.0 && miss_prob <= 1.0))
      throw std::invalid_argument("detector: miss_prob must be in [0, 1]");
    latency.validate();
    if (backend == Backend::PERFECT &&
        (center_jitter != 0.0 || size_jitter != 0.0 || miss_prob != 0.0 ||
         latency.kind != LatencyKind::CONSTANT || latency.constant_s != 0.0))
      throw std::invalid_argument(
          "detector: PERFECT backend requires zero jitter, zero miss "
          "probability and zero latency");
  }
};

// Construct a model, forcing the PERFECT invariants (zero noise, zero
// latency) regardless of the noise arguments.
inline DetectorModel make_detector(Backend backend, double center_jitter,
                                   double size_jitter, double miss_prob,
                                   LatencyProfile latency) {
  DetectorModel m;
  m.backend = backend;
  if (backend == Backend::PERFECT) {
    m.latency = LatencyProfile::constant("PERFECT", 0.0);
  } else {
    m.center_jitter = center_jitter;
    m.size_jitter = size_jitter;
    m.miss_prob = miss_prob;
    m.latency = std::move(latency);
  }
  m.validate();
  return m;
}

struct DetectionOutcome {
  std::optional<Detection> detection;
  double inference_s = 0.0;  // consumed even when nothing is detected
};

// One detector pass over a frame. Draw order is fixed so a seed fully
// determines the stream: inference time, miss, center x/y jitter, width and
// height jitter, confidence.
template <class URBG>
DetectionOutcome run_detector(const std::optional<BoundingBox>& truth,
                              const DetectorModel& model, URBG& rng,
                              std::uint64_t frame = 0) {
  if (model.backend == Backend::PERFECT) {
    if (!truth) return {std::nullopt, 0.0};
    return {Detection{*truth, 1.0, 0.0, frame}, 0.0};
  }
  DetectionOutcome out;
  out.inference_s = sample_latency(model.latency, rng);
  if (!truth) return out;
  if (uniform01(rng) < model.miss_prob) return out;

  const Vec2 c = bbox_center(*truth);
  const double cx = c.x + model.center_jitter * gaussian(rng);
  const double cy = c.y + model.center_jitter * gaussian(rng);
  const double w =
      std::max(truth->width() + model.size_jitter * gaussian(rng), 1e-6);
  const double h =
      std::max(truth->height() + model.size_jitter * gaussian(rng), 1e-6);
  const double confidence = 1.0 - 0.05 * uniform01(rng);

  BoundingBox box{std::max(0.0, cx - w / 2.0), std::max(0.0, cy - h / 2.0),
                  std::min(1.0, cx + w / 2.0), std::min(1.0, cy + h / 2.0)};
  if (!(box.x_min < box.x_max && box.y_min < box.y_max))
    return out;  // jittered fully out of frame, counts as a miss
  out.detection = Detection{box, confidence, out.inference_s, frame};
  return out;
}

template <class URBG>
std::optional<Detection> detect(const std::optional<BoundingBox>& truth,
                                const DetectorModel& model, URBG& rng,
                                std::uint64_t frame = 0) {
  return run_detector(truth, model, rng, frame).detection;
}

inline DetectionDelta compute_delta(const std::optional<Detection>& detection,
                                    const TargetPoint& target) {
  if (!detection) return DetectionDelta{0.0, 0.0, false};
  const Vec2 c = bbox_center(detection->box);
  return DetectionDelta{c.x - target.cx, c.y - target.cy, true};
}

// One feature-map layer of a single-shot detector head.
struct SsdLayer {
  int grid_side = 0;       // cells per side of the square feature map
  int boxes_per_cell = 0;  // anchor boxes evaluated per cell
};

inline const std::vector<SsdLayer>& default_ssd_layers() {
  static const std::vector<SsdLayer> layers = {{38, 4}, {19, 6}, {10, 6},
                                               {5, 6},  {3, 4},  {1, 4}};
  return layers;
}

inline std::int64_t layer_prediction_count(const SsdLayer& layer) {
  if (layer.grid_side < 0 || layer.boxes_per_cell < 0)
    throw std::invalid_argument("ssd layer: negative dimension");
  return static_cast<std::int64_t>(layer.grid_side) * layer.grid_side *
         layer.boxes_per_cell;
}

// Total predictions evaluated per frame across all layers.
inline std::int64_t ssd_prediction_count(const std::vector<SsdLayer>& layers) {
  std::int64_t total = 0;
  for (const auto& l : layers) total += layer_prediction_count(l);
  return total;
}

}  // namespace followsim

#pragma once

// Maps a detection delta to one of the nine action cases. The x bracket
// picks the steering column, the y bracket picks the throttle row:
//
//        x < -x_thr       |x| <= x_thr     x > +x_thr
//   y < -y_fwd_thr : 1 fwd+left    2 fwd         3 fwd+right
//   in between     : 4 left        5 null        6 right
//   y > +y_rev_thr : 7 back+RIGHT  8 back        9 back+LEFT
//
// The back row mirrors the steering sign on purpose: when reversing, the
// nose swings opposite the steering direction, so a target on the left
// needs right steering to rotate the nose toward it.

#include <stdexcept>

#include "followsim/detection.hpp"

namespace followsim {

struct BracketConfig {
  double x_thr = 0.15;
  double y_fwd_thr = 0.10;
  double y_rev_thr = 0.10;

  void validate() const {
    if (!(x_thr > 0.0 && y_fwd_thr > 0.0 && y_rev_thr > 0.0))
      throw std::invalid_argument("nav: bracket thresholds must be positive");
  }
};

struct ActionTable {
  double steer_mag = 0.7;     // |steering| for the steering cases
  double fwd_throttle = 0.6;  // throttle for cases 1..3
  double rev_throttle = 0.5;  // |throttle| for cases 7..9

  void validate() const {
    if (!(steer_mag > 0.0 && steer_mag <= 1.0 && fwd_throttle > 0.0 &&
          fwd_throttle <= 1.0 && rev_throttle > 0.0 && rev_throttle <= 1.0))
      throw std::invalid_argument("nav: action magnitudes must be in (0, 1]");
  }
};

// steering: -1 full left .. +1 full right; throttle: -1 full reverse ..
// +1 full forward. case_id 5 is the unique all-null case.
struct ActionCommand {
  int case_id = 5;
  double steering = 0.0;
  double throttle = 0.0;
};

// Total on all inputs: every delta lands in exactly one case. Values exactly
// on a threshold resolve to the null bracket. An undetected delta is case 5
// regardless of its (zeroed) components.
inline int classify_case(const DetectionDelta& delta,
                         const BracketConfig& brackets) {
  brackets.validate();
  if (!delta.detected) return 5;
  int col = 1;  // 0 = left, 1 = center, 2 = right
  if (delta.dx < -brackets.x_thr) col = 0;
  else if (delta.dx > brackets.x_thr) col = 2;
  int row = 1;  // 0 = forward, 1 = hold, 2 = back
  if (delta.dy < -brackets.y_fwd_thr) row = 0;
  else if (delta.dy > brackets.y_rev_thr) row = 2;
  return row * 3 + col + 1;
}

inline ActionCommand plan_action(int case_id, const ActionTable& table) {
  table.validate();
  if (case_id < 1 || case_id > 9)
    throw std::invalid_argument("nav: case_id must be in 1..9");
  ActionCommand cmd;
  cmd.case_id = case_id;
  switch (case_id) {
    case 1: case 4: cmd.steering = -table.steer_mag; break;  // left
    case 3: case 6: cmd.steering = table.steer_mag; break;   // right
    case 7: cmd.steering = table.steer_mag; break;           // back row mirror
    case 9: cmd.steering = -table.steer_mag; break;
    default: break;
  }
  if (case_id <= 3) cmd.throttle = table.fwd_throttle;
  else if (case_id >= 7) cmd.throttle = -table.rev_throttle;
  return cmd;
}

// Stateful wrapper with optional case hysteresis: a case change is adopted
// only after the same new case is classified for `hysteresis` consecutive
// deltas. hysteresis == 1 adopts immediately. Initial case is 5.
class Navigator {
 public:
  Navigator(BracketConfig brackets, ActionTable table, int hysteresis = 1)
      : brackets_(brackets), table_(table), hysteresis_(hysteresis) {
    brackets_.validate();
    table_.validate();
    if (hysteresis_ < 1)
      throw std::invalid_argument("nav: hysteresis must be >= 1");
  }

  ActionCommand step(const DetectionDelta& delta) {
    const int incoming = classify_case(delta, brackets_);
    if (incoming == current_) {
      pending_count_ = 0;
    } else if (incoming == pending_) {
      if (++pending_count_ >= hysteresis_) {
        current_ = incoming;
        pending_count_ = 0;
      }
    } else {
      pending_ = incoming;
      pending_count_ = 1;
      if (pending_count_ >= hysteresis_) {
        current_ = incoming;
        pending_count_ = 0;
      }
    }
    return plan_action(current_, table_);
  }

  int current_case() const { return current_; }

 private:
  BracketConfig brackets_;
  ActionTable table_;
  int hysteresis_;
  int current_ = 5;
  int pending_ = 5;
  int pending_count_ = 0;
};

}  // namespace followsim

#pragma once

// Piecewise-linear map between normalized action values [-1, +1] and PWM
// duty cycles. The half-ranges [min, mid] and [mid, max] are scaled
// independently, so an asymmetric calibration keeps value 0 at mid duty.

#include <algorithm>
#include <stdexcept>
#include <string>

#include "followsim/navigation.hpp"

namespace followsim {

struct ChannelCalibration {
  double min_duty = 0.05;
  double mid_duty = 0.075;
  double max_duty = 0.10;
  int polarity = 1;  // +1 or -1, flips the direction of the channel

  void validate(const char* channel) const {
    if (!(min_duty < mid_duty && mid_duty < max_duty))
      throw std::invalid_argument(std::string("servo.") + channel +
                                  ": duties must satisfy min < mid < max");
    if (polarity != 1 && polarity != -1)
      throw std::invalid_argument(std::string("servo.") + channel +
                                  ": polarity must be +1 or -1");
  }
};

struct ServoCalibration {
  ChannelCalibration steering;
  ChannelCalibration throttle;

  void validate() const {
    steering.validate("steering");
    throttle.validate("throttle");
  }
};

struct ServoSetting {
  double steering_duty = 0.0;
  double throttle_duty = 0.0;
};

// value is clamped to [-1, +1] after applying polarity.
inline double action_to_duty(double value, const ChannelCalibration& ch) {
  const double v =
      std::clamp(value * static_cast<double>(ch.polarity), -1.0, 1.0);
  return v >= 0.0 ? ch.mid_duty + v * (ch.max_duty - ch.mid_duty)
                  : ch.mid_duty + v * (ch.mid_duty - ch.min_duty);
}

// Exact inverse of action_to_duty on the non-clamped range. duty must lie in
// [min_duty, max_duty].
inline double duty_to_action(double duty, const ChannelCalibration& ch) {
  if (!(duty >= ch.min_duty && duty <= ch.max_duty))
    throw std::invalid_argument("servo: duty outside calibrated range");
  const double v = duty >= ch.mid_duty
                       ? (duty - ch.mid_duty) / (ch.max_duty - ch.mid_duty)
                       : (duty - ch.mid_duty) / (ch.mid_duty - ch.min_duty);
  return v * static_cast<double>(ch.polarity);
}

inline ServoSetting apply_action(const ActionCommand& cmd,
                                 const ServoCalibration& cal) {
  return ServoSetting{action_to_duty(cmd.steering, cal.steering),
                      action_to_duty(cmd.throttle, cal.throttle)};
}

}  // namespace followsim

#include "followsim/navigation.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "followsim/random.hpp"

namespace followsim {
namespace {

const BracketConfig kBrackets{0.15, 0.10, 0.10};
const ActionTable kTable{0.7, 0.6, 0.5};

DetectionDelta delta(double dx, double dy) { return DetectionDelta{dx, dy, true}; }

TEST(Navigation, PinnedCaseExamples) {
  EXPECT_EQ(classify_case(delta(0.0, 0.0), kBrackets), 5);
  EXPECT_EQ(classify_case(delta(-0.5, -0.5), kBrackets), 1);
  EXPECT_EQ(classify_case(delta(0.0, -0.5), kBrackets), 2);
  EXPECT_EQ(classify_case(delta(0.5, -0.5), kBrackets), 3);
  EXPECT_EQ(classify_case(delta(-0.5, 0.0), kBrackets), 4);
  EXPECT_EQ(classify_case(delta(0.5, 0.0), kBrackets), 6);
  EXPECT_EQ(classify_case(delta(-0.5, 0.5), kBrackets), 7);
  EXPECT_EQ(classify_case(delta(0.0, 0.5), kBrackets), 8);
  EXPECT_EQ(classify_case(delta(0.5, 0.5), kBrackets), 9);
}

TEST(Navigation, UndetectedIsCaseFive) {
  EXPECT_EQ(classify_case(DetectionDelta{0, 0, false}, kBrackets), 5);
  // Even a malformed undetected delta maps to 5; the flag wins.
  EXPECT_EQ(classify_case(DetectionDelta{0.9, 0.9, false}, kBrackets), 5);
}

TEST(Navigation, BoundariesFallInNullBracket) {
  // Values exactly on a threshold belong to the center/hold bracket.
  EXPECT_EQ(classify_case(delta(-kBrackets.x_thr, 0.0), kBrackets), 5);
  EXPECT_EQ(classify_case(delta(kBrackets.x_thr, 0.0), kBrackets), 5);
  EXPECT_EQ(classify_case(delta(0.0, -kBrackets.y_fwd_thr), kBrackets), 5);
  EXPECT_EQ(classify_case(delta(0.0, kBrackets.y_rev_thr), kBrackets), 5);
  EXPECT_EQ(classify_case(delta(-kBrackets.x_thr, -kBrackets.y_fwd_thr),
                          kBrackets),
            5);
}

int oracle_case(const DetectionDelta& d, const BracketConfig& b) {
  // Independent nested-if formulation.
  if (!d.detected) return 5;
  int row;
  if (d.dy < -b.y_fwd_thr)
    row = 0;
  else if (d.dy > b.y_rev_thr)
    row = 2;
  else
    row = 1;
  int col;
  if (d.dx < -b.x_thr)
    col = 0;
  else if (d.dx > b.x_thr)
    col = 2;
  else
    col = 1;
  return row * 3 + col + 1;
}

TEST(Navigation, TotalityAgainstOracle) {
  Rng rng(2024);
  for (int i = 0; i < 100000; ++i) {
    const double dx = 2.0 * uniform01(rng) - 1.0;
    const double dy = 2.0 * uniform01(rng) - 1.0;
    const DetectionDelta d = delta(dx, dy);
    const int c = classify_case(d, kBrackets);
    ASSERT_GE(c, 1);
    ASSERT_LE(c, 9);
    ASSERT_EQ(c, oracle_case(d, kBrackets)) << dx << "," << dy;
  }
}

TEST(Navigation, PlanActionTable) {
  auto act = [&](int dx_sign, double dy) {
    return plan_action(
        classify_case(delta(0.5 * dx_sign, dy), kBrackets), kTable);
  };
  // Forward row.
  ActionCommand c1 = act(-1, -0.5);
  EXPECT_EQ(c1.case_id, 1);
  EXPECT_DOUBLE_EQ(c1.steering, -0.7);
  EXPECT_DOUBLE_EQ(c1.throttle, 0.6);
  ActionCommand c2 = act(0, -0.5);
  EXPECT_EQ(c2.case_id, 2);
  EXPECT_DOUBLE_EQ(c2.steering, 0.0);
  EXPECT_DOUBLE_EQ(c2.throttle, 0.6);
  ActionCommand c3 = act(1, -0.5);
  EXPECT_EQ(c3.case_id, 3);
  EXPECT_DOUBLE_EQ(c3.steering, 0.7);
  EXPECT_DOUBLE_EQ(c3.throttle, 0.6);
  // Hold row: steer in place commands no throttle.
  ActionCommand c4 = act(-1, 0.0);
  EXPECT_EQ(c4.case_id, 4);
  EXPECT_DOUBLE_EQ(c4.steering, -0.7);
  EXPECT_DOUBLE_EQ(c4.throttle, 0.0);
  ActionCommand c5 = act(0, 0.0);
  EXPECT_EQ(c5.case_id, 5);
  EXPECT_DOUBLE_EQ(c5.steering, 0.0);
  EXPECT_DOUBLE_EQ(c5.throttle, 0.0);
  ActionCommand c6 = act(1, 0.0);
  EXPECT_EQ(c6.case_id, 6);
  EXPECT_DOUBLE_EQ(c6.steering, 0.7);
  EXPECT_DOUBLE_EQ(c6.throttle, 0.0);
  // Back row: steering mirrored for reversing.
  ActionCommand c7 = act(-1, 0.5);
  EXPECT_EQ(c7.case_id, 7);
  EXPECT_DOUBLE_EQ(c7.steering, 0.7);
  EXPECT_DOUBLE_EQ(c7.throttle, -0.5);
  ActionCommand c8 = act(0, 0.5);
  EXPECT_EQ(c8.case_id, 8);
  EXPECT_DOUBLE_EQ(c8.steering, 0.0);
  EXPECT_DOUBLE_EQ(c8.throttle, -0.5);
  ActionCommand c9 = act(1, 0.5);
  EXPECT_EQ(c9.case_id, 9);
  EXPECT_DOUBLE_EQ(c9.steering, -0.7);
  EXPECT_DOUBLE_EQ(c9.throttle, -0.5);
}

TEST(Navigation, PlanActionRejectsBadCase) {
  EXPECT_THROW(plan_action(0, kTable), std::invalid_argument);
  EXPECT_THROW(plan_action(10, kTable), std::invalid_argument);
}

TEST(Navigation, NavigatorImmediateAdoption) {
  Navigator nav(kBrackets, kTable, 1);
  EXPECT_EQ(nav.current_case(), 5);
  ActionCommand a = nav.step(delta(-0.5, -0.5));
  EXPECT_EQ(a.case_id, 1);
  EXPECT_EQ(nav.current_case(), 1);
  a = nav.step(delta(0.5, -0.5));
  EXPECT_EQ(a.case_id, 3);
}

TEST(Navigation, NavigatorHysteresisFiltersSingleFlips) {
  Navigator nav(kBrackets, kTable, 2);
  // One classification is not enough to leave the initial case.
  ActionCommand a = nav.step(delta(-0.5, -0.5));
  EXPECT_EQ(a.case_id, 5);
  a = nav.step(delta(-0.5, -0.5));
  EXPECT_EQ(a.case_id, 1);
  // A single-frame excursion to case 3 does not switch...
  a = nav.step(delta(0.5, -0.5));
  EXPECT_EQ(a.case_id, 1);
  // ...and coming back to case 1 resets the pending count, so the
  // next lone case-3 frame still does not switch.
  a = nav.step(delta(-0.5, -0.5));
  EXPECT_EQ(a.case_id, 1);
  a = nav.step(delta(0.5, -0.5));
  EXPECT_EQ(a.case_id, 1);
  // A second consecutive case-3 frame finally does.
  a = nav.step(delta(0.5, -0.5));
  EXPECT_EQ(a.case_id, 3);
}

TEST(Navigation, BracketValidation) {
  BracketConfig bad = kBrackets;
  bad.x_thr = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = kBrackets;
  bad.y_rev_thr = -0.1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  ActionTable bad_table = kTable;
  bad_table.steer_mag = 0.0;
  EXPECT_THROW(bad_table.validate(), std::invalid_argument);
  bad_table = kTable;
  bad_table.fwd_throttle = 1.5;
  EXPECT_THROW(bad_table.validate(), std::invalid_argument);
  EXPECT_THROW(Navigator(kBrackets, kTable, 0), std::invalid_argument);
}

}  // namespace
}  // namespace followsim

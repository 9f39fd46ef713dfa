#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coevo/rng.hpp"
#include "coevo/value.hpp"

namespace coevo {

struct EnvParams {
  double l1 = 1.0;
  double l2 = 1.0;
  double v_max = 1.0;          // rad/s command ceiling, both joints
  double dt = 0.1;             // s per engine step
  double joint_lo = -1.5707963267948966;  // -pi/2
  double joint_hi = 3.141592653589793;    // pi
  bool obstructed = false;     // elbow band the linkage cannot pass through
  double obstruct_lo = 0.45;
  double obstruct_hi = 0.60;
  double start_shoulder = 0.0;
  double start_elbow = 0.2;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

Point2 forward_kinematics(const EnvParams& p, double shoulder, double elbow);

// Elbow-up joint solution (elbow angle in [0, pi]) for a point inside the
// reach annulus; the radius is clamped into reach before solving, so any
// finite point yields a pose.
std::pair<double, double> inverse_kinematics_elbow_up(const EnvParams& p, Point2 target);

// Planar two-joint arm driven by per-step velocity commands. The elbow band
// [obstruct_lo, obstruct_hi] is impassable from either side: motion that would
// cross into the interior stops at the entry edge and raises the contact flag
// for that step.
class ArmEnv {
 public:
  explicit ArmEnv(EnvParams params = {});

  // Canonical motor register names, one per joint.
  static const std::vector<std::string>& motor_keys();

  // Restores the start pose, clears command history, and samples a fresh
  // object position by drawing a reachable elbow-up pose away from the joint
  // limits (and outside the band) and pushing it through the kinematics. The
  // draw sequence ignores the obstruction flag, so paired runs that differ
  // only in `obstructed` see identical objects.
  void reset(Rng& rng);

  // Integrates one step. Commands default to 0.0 when missing; magnitudes
  // clamp to v_max before integration.
  void apply_motors(const std::map<std::string, double>& cmds);

  std::map<std::string, Value> read_sensors() const;

  double shoulder() const { return shoulder_; }
  double elbow() const { return elbow_; }
  bool contact() const { return contact_; }
  Point2 hand() const { return forward_kinematics(params_, shoulder_, elbow_); }
  Point2 object() const { return object_; }
  const EnvParams& params() const { return params_; }

  // Places the object directly; used by scripted setups.
  void set_object(Point2 p) { object_ = p; }
  void set_pose(double shoulder, double elbow);

 private:
  EnvParams params_;
  double shoulder_ = 0.0;
  double elbow_ = 0.0;
  double last_shoulder_cmd_ = 0.0;
  double last_elbow_cmd_ = 0.0;
  bool contact_ = false;
  Point2 object_;
};

}  // namespace coevo

#include "coevo/env.hpp"

#include <algorithm>
#include <cmath>

namespace coevo {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double fetch(const std::map<std::string, double>& cmds, const std::string& key) {
  auto it = cmds.find(key);
  return it == cmds.end() ? 0.0 : it->second;
}

}  // namespace

Point2 forward_kinematics(const EnvParams& p, double shoulder, double elbow) {
  return Point2{p.l1 * std::cos(shoulder) + p.l2 * std::cos(shoulder + elbow),
                p.l1 * std::sin(shoulder) + p.l2 * std::sin(shoulder + elbow)};
}

std::pair<double, double> inverse_kinematics_elbow_up(const EnvParams& p, Point2 target) {
  const double r2 = target.x * target.x + target.y * target.y;
  const double c = clamp((r2 - p.l1 * p.l1 - p.l2 * p.l2) / (2.0 * p.l1 * p.l2), -1.0, 1.0);
  const double elbow = std::acos(c);
  const double shoulder = std::atan2(target.y, target.x) -
                          std::atan2(p.l2 * std::sin(elbow), p.l1 + p.l2 * std::cos(elbow));
  return {shoulder, elbow};
}

ArmEnv::ArmEnv(EnvParams params) : params_(params) {
  shoulder_ = params_.start_shoulder;
  elbow_ = params_.start_elbow;
  object_ = hand();
}

const std::vector<std::string>& ArmEnv::motor_keys() {
  static const std::vector<std::string> keys = {"motor/shoulder_vel", "motor/elbow_vel"};
  return keys;
}

void ArmEnv::set_pose(double shoulder, double elbow) {
  shoulder_ = clamp(shoulder, params_.joint_lo, params_.joint_hi);
  elbow_ = clamp(elbow, params_.joint_lo, params_.joint_hi);
  if (params_.obstructed && elbow_ > params_.obstruct_lo && elbow_ < params_.obstruct_hi) {
    const double mid = 0.5 * (params_.obstruct_lo + params_.obstruct_hi);
    elbow_ = elbow_ < mid ? params_.obstruct_lo : params_.obstruct_hi;
  }
}

void ArmEnv::reset(Rng& rng) {
  shoulder_ = params_.start_shoulder;
  elbow_ = params_.start_elbow;
  last_shoulder_cmd_ = 0.0;
  last_elbow_cmd_ = 0.0;
  contact_ = false;
  // Elbow-up poses away from the limits keep the object's inverse-kinematics
  // solution unique and inside the joint range.
  const double margin = 0.2;
  std::uniform_real_distribution<double> sh(params_.joint_lo + margin,
                                            params_.joint_hi - margin);
  std::uniform_real_distribution<double> el(margin, params_.joint_hi - margin);
  double th1 = 0.0, th2 = 0.0;
  do {
    th1 = sh(rng);
    th2 = el(rng);
  } while (th2 > params_.obstruct_lo && th2 < params_.obstruct_hi);
  object_ = forward_kinematics(params_, th1, th2);
}

void ArmEnv::apply_motors(const std::map<std::string, double>& cmds) {
  const double sv = clamp(fetch(cmds, "motor/shoulder_vel"), -params_.v_max, params_.v_max);
  const double ev = clamp(fetch(cmds, "motor/elbow_vel"), -params_.v_max, params_.v_max);
  last_shoulder_cmd_ = sv;
  last_elbow_cmd_ = ev;

  shoulder_ = clamp(shoulder_ + sv * params_.dt, params_.joint_lo, params_.joint_hi);

  const double from = elbow_;
  double target = clamp(elbow_ + ev * params_.dt, params_.joint_lo, params_.joint_hi);
  contact_ = false;
  // The band is impassable in both directions; targets past the far edge
  // still stop at the near one.
  if (params_.obstructed) {
    if (from <= params_.obstruct_lo && target > params_.obstruct_lo) {
      target = params_.obstruct_lo;
      contact_ = true;
    } else if (from >= params_.obstruct_hi && target < params_.obstruct_hi) {
      target = params_.obstruct_hi;
      contact_ = true;
    }
  }
  elbow_ = target;
}

std::map<std::string, Value> ArmEnv::read_sensors() const {
  const Point2 h = hand();
  const double dx = h.x - object_.x;
  const double dy = h.y - object_.y;
  std::map<std::string, Value> s;
  s.emplace("sensor/shoulder_angle", Value::scalar(shoulder_));
  s.emplace("sensor/elbow_angle", Value::scalar(elbow_));
  s.emplace("sensor/hand_x", Value::scalar(h.x));
  s.emplace("sensor/hand_y", Value::scalar(h.y));
  s.emplace("sensor/obj_x", Value::scalar(object_.x));
  s.emplace("sensor/obj_y", Value::scalar(object_.y));
  s.emplace("sensor/obj_dist", Value::scalar(std::sqrt(dx * dx + dy * dy)));
  s.emplace("sensor/contact", Value::signal(contact_));
  s.emplace("sensor/last_shoulder_cmd", Value::scalar(last_shoulder_cmd_));
  s.emplace("sensor/last_elbow_cmd", Value::scalar(last_elbow_cmd_));
  return s;
}

}  // namespace coevo

#include "coevo/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "coevo/atoms.hpp"
#include "coevo/engine.hpp"
#include "coevo/errors.hpp"

namespace coevo {

namespace {

constexpr double kForwardModelLr = 0.05;
constexpr int kPolicyHidden = 16;
constexpr std::uint64_t kPolicyTrainSeed = 0x9E11C7;
constexpr std::uint64_t kPolicyInitSeed = 0x57A97;

Atom make_atom(Id id, AtomKind kind, std::vector<double> params,
               std::vector<std::string> inputs, std::vector<std::string> outputs,
               ActivationKind act, bool reflex) {
  Atom atom;
  atom.id = id;
  atom.kind = kind;
  atom.params = std::move(params);
  atom.inputs = std::move(inputs);
  atom.outputs = std::move(outputs);
  atom.activation.kind = act;
  atom.activation.input_index = 0;
  atom.reflex = reflex;
  return atom;
}

// Minimal trainer for the 4->16->2 tanh-hidden network, laid out exactly as
// the runtime expects: w1 row-major, then b1, w2 row-major, b2.
struct PolicyNet {
  std::vector<double> w;  // named slices below

  double* w1() { return w.data(); }
  double* b1() { return w.data() + kPolicyHidden * 4; }
  double* w2() { return b1() + kPolicyHidden; }
  double* b2() { return w2() + 2 * kPolicyHidden; }

  void forward(const double* x, double* h, double* y) {
    for (int j = 0; j < kPolicyHidden; ++j) {
      double s = b1()[j];
      for (int i = 0; i < 4; ++i) s += w1()[j * 4 + i] * x[i];
      h[j] = std::tanh(s);
    }
    for (int k = 0; k < 2; ++k) {
      double s = b2()[k];
      for (int j = 0; j < kPolicyHidden; ++j) s += w2()[k * kPolicyHidden + j] * h[j];
      y[k] = s;
    }
  }

  void sgd(const double* x, const double* target, double lr) {
    double h[kPolicyHidden];
    double y[2];
    forward(x, h, y);
    double err[2] = {y[0] - target[0], y[1] - target[1]};
    double dh[kPolicyHidden] = {};
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < kPolicyHidden; ++j) {
        dh[j] += err[k] * w2()[k * kPolicyHidden + j];
        w2()[k * kPolicyHidden + j] -= lr * err[k] * h[j];
      }
      b2()[k] -= lr * err[k];
    }
    for (int j = 0; j < kPolicyHidden; ++j) {
      const double g = dh[j] * (1.0 - h[j] * h[j]);
      for (int i = 0; i < 4; ++i) w1()[j * 4 + i] -= lr * g * x[i];
      b1()[j] -= lr * g;
    }
  }
};

std::vector<double> random_policy_init(std::uint64_t seed) {
  Rng rng = make_rng(seed, 1);
  std::normal_distribution<double> n(0.0, 0.3);
  std::vector<double> w(kInverseModelWeights);
  for (double& v : w) v = n(rng);
  PolicyNet net{w};
  for (int j = 0; j < kPolicyHidden; ++j) net.b1()[j] = 0.0;
  net.b2()[0] = net.b2()[1] = 0.0;
  return net.w;
}

// Supervised on generated kinematics data: for a pose and a reachable object,
// the teaching signal is a proportional controller toward the object's
// elbow-up joint solution. Half the poses sit near the solution so the net is
// accurate where trials spend their final approach.
std::vector<double> train_policy() {
  const EnvParams env;
  PolicyNet net{random_policy_init(kPolicyInitSeed)};
  Rng rng = make_rng(kPolicyTrainSeed, 1);
  const double margin = 0.2;
  std::uniform_real_distribution<double> sh(env.joint_lo + margin, env.joint_hi - margin);
  std::uniform_real_distribution<double> el(margin, env.joint_hi - margin);
  std::uniform_real_distribution<double> pose1(env.joint_lo, env.joint_hi);
  std::uniform_real_distribution<double> pose2(env.joint_lo, env.joint_hi);
  std::normal_distribution<double> near(0.0, 0.3);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const int steps = 200000;
  for (int it = 0; it < steps; ++it) {
    const double t1 = sh(rng);
    const double t2 = el(rng);
    const Point2 obj = forward_kinematics(env, t1, t2);
    double p1, p2;
    if (coin(rng) < 0.5) {
      p1 = std::clamp(t1 + near(rng), env.joint_lo, env.joint_hi);
      p2 = std::clamp(t2 + near(rng), env.joint_lo, env.joint_hi);
    } else {
      p1 = pose1(rng);
      p2 = pose2(rng);
    }
    const double x[4] = {obj.x, obj.y, p1, p2};
    const double target[2] = {std::clamp(2.0 * (t1 - p1), -1.0, 1.0),
                              std::clamp(2.0 * (t2 - p2), -1.0, 1.0)};
    net.sgd(x, target, it < steps / 2 ? 0.05 : 0.01);
  }
  return net.w;
}

std::vector<double> policy_params(const std::vector<double>& weights) {
  std::vector<double> params;
  params.reserve(1 + weights.size());
  params.push_back(kForwardModelLr);
  params.insert(params.end(), weights.begin(), weights.end());
  return params;
}

Scenario make_resistance(const RunConfig& c) {
  Scenario s;
  s.name = "resistance";
  s.t_steps = 100;
  s.obstructed = true;
  ActorMolecule mol;
  mol.atoms.push_back(make_atom(1, AtomKind::ForwardModel, {kForwardModelLr},
                                {"sensor/elbow_angle", "sensor/last_elbow_cmd"},
                                {"wm/fm_wake", "wm/pred", "wm/obs"},
                                ActivationKind::AlwaysOn, true));
  // Signed difference: the raised surplus (prediction minus outcome) is what
  // the climber farms, and the innate game pays for it.
  mol.atoms.push_back(make_atom(2, AtomKind::SquaredError, {0.0},
                                {"wm/fm_wake", "wm/pred", "wm/obs"},
                                {"wm/se_wake", "wm/pred_err"},
                                ActivationKind::SignalTrue, true));
  mol.atoms.push_back(make_atom(3, AtomKind::StochasticHillClimber,
                                {1.0, c.shc_sigma, c.shc_p_worse, 1.0},
                                {"wm/se_wake", "wm/pred_err"},
                                {"wm/shc_wake", "wm/cand"},
                                ActivationKind::SignalTrue, true));
  mol.atoms.push_back(make_atom(4, AtomKind::MotorWriter, {1.0},
                                {"wm/shc_wake", "wm/cand"},
                                {"wm/mw_wake", "motor/elbow_vel"},
                                ActivationKind::SignalTrue, true));
  s.molecules.push_back(std::move(mol));
  s.games.push_back(make_atom(5, AtomKind::AccumulateValue, {1.0}, {"wm/pred_err"}, {},
                              ActivationKind::AlwaysOn, true));
  return s;
}

Scenario make_reaching(const RunConfig& c, const std::vector<double>& weights,
                       const std::string& name) {
  Scenario s;
  s.name = name;
  s.t_steps = 200;
  s.obstructed = false;
  ActorMolecule mol;
  mol.atoms.push_back(make_atom(1, AtomKind::Accumulator, {0.0}, {"sensor/obj_dist"},
                                {"wm/see", "wm/dist_echo"}, ActivationKind::AlwaysOn,
                                true));
  mol.atoms.push_back(make_atom(2, AtomKind::InverseModel, policy_params(weights),
                                {"wm/see", "sensor/obj_x", "sensor/obj_y",
                                 "sensor/shoulder_angle", "sensor/elbow_angle"},
                                {"wm/im_wake", "wm/im_cmd"}, ActivationKind::SignalTrue,
                                false));
  mol.atoms.push_back(make_atom(3, AtomKind::StochasticHillClimber,
                                {2.0, c.shc_sigma, c.shc_p_worse, -1.0},
                                {"wm/see", "wm/dist_echo"}, {"wm/shc_wake", "wm/shc_cmd"},
                                ActivationKind::SignalTrue, false));
  mol.atoms.push_back(make_atom(4, AtomKind::MotorWriter, {1.0},
                                {"wm/im_wake", "wm/im_cmd"},
                                {"wm/mw1_wake", "motor/shoulder_vel", "motor/elbow_vel"},
                                ActivationKind::SignalTrue, false));
  mol.atoms.push_back(make_atom(5, AtomKind::MotorWriter, {1.0},
                                {"wm/shc_wake", "wm/shc_cmd"},
                                {"wm/mw2_wake", "motor/shoulder_vel", "motor/elbow_vel"},
                                ActivationKind::SignalTrue, false));
  s.molecules.push_back(std::move(mol));
  s.games.push_back(make_atom(6, AtomKind::NegateForMinimize, {1.0}, {"wm/dist_echo"},
                              {}, ActivationKind::AlwaysOn, true));
  return s;
}

Scenario make_mi_observer(const RunConfig& c) {
  Scenario s;
  s.name = "mi_observer";
  s.t_steps = 200;
  s.obstructed = false;
  ActorMolecule mol;
  mol.atoms.push_back(make_atom(
      1, AtomKind::MutualInfo,
      {static_cast<double>(c.mi_bins), static_cast<double>(c.mi_window), -c.env.v_max,
       c.env.v_max, c.env.joint_lo, c.env.joint_hi},
      {"sensor/last_elbow_cmd", "sensor/elbow_angle"}, {"wm/mi_wake", "wm/mi_score"},
      ActivationKind::AlwaysOn, true));
  s.molecules.push_back(std::move(mol));
  s.games.push_back(make_atom(2, AtomKind::AccumulateValue, {1.0}, {"wm/mi_score"}, {},
                              ActivationKind::AlwaysOn, true));
  return s;
}

Scenario make_minimal(const RunConfig&) {
  Scenario s;
  s.name = "minimal";
  s.t_steps = 50;
  s.obstructed = false;
  ActorMolecule mol;
  mol.atoms.push_back(make_atom(1, AtomKind::Accumulator, {0.0}, {"sensor/elbow_angle"},
                                {"wm/echo_wake", "wm/echo"}, ActivationKind::AlwaysOn,
                                true));
  s.molecules.push_back(std::move(mol));
  s.games.push_back(make_atom(2, AtomKind::AccumulateValue, {1.0}, {"wm/echo"}, {},
                              ActivationKind::AlwaysOn, true));
  return s;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"minimal", "mi_observer",
                                                 "reaching_two_path", "resistance"};
  return names;
}

const std::vector<double>& reaching_policy_weights() {
  static const std::vector<double> weights = train_policy();
  return weights;
}

Scenario build_scenario(const std::string& name, const RunConfig& config) {
  Scenario s;
  if (name == "resistance") {
    s = make_resistance(config);
  } else if (name == "reaching_two_path") {
    s = make_reaching(config, reaching_policy_weights(), "reaching_two_path");
  } else if (name == "mi_observer") {
    s = make_mi_observer(config);
  } else if (name == "minimal") {
    s = make_minimal(config);
  } else {
    throw UnknownScenario("no scenario named '" + name + "'");
  }
  validate_scenario(s);
  return s;
}

Scenario build_reaching_untrained(const RunConfig& config) {
  Scenario s = make_reaching(config, random_policy_init(kPolicyInitSeed),
                             "reaching_two_path_untrained");
  validate_scenario(s);
  return s;
}

Scenario build_resistance_mutant(int which, const RunConfig& config) {
  Scenario s = make_resistance(config);
  s.name = "resistance_mutant_" + std::to_string(which);
  std::vector<Atom>& atoms = s.molecules[0].atoms;
  switch (which) {
    case 1:  // watch the shoulder, not the elbow
      atoms[0].inputs[0] = "sensor/shoulder_angle";
      break;
    case 2: {  // parallel error atom on a second key
      Atom copy = atoms[1];
      copy.id = 6;
      copy.outputs = {"wm/se2_wake", "wm/err2"};
      copy.reflex = false;
      atoms.push_back(std::move(copy));
      break;
    }
    case 3:  // climb downhill instead
      atoms[2].params[3] = -1.0;
      break;
    case 4:  // drive the other joint
      atoms[3].outputs[1] = "motor/shoulder_vel";
      break;
    default:
      throw UnknownScenario("resistance mutants are numbered 1-4");
  }
  validate_scenario(s);
  return s;
}

void validate_scenario(const Scenario& scenario) {
  if (scenario.molecules.empty()) {
    throw ValidationFailure("scenario '" + scenario.name + "' has no molecules");
  }
  if (scenario.t_steps <= 0) {
    throw ValidationFailure("scenario '" + scenario.name + "' has no trial budget");
  }
  validate_population(scenario.molecules, scenario.games);
  bool has_protected_initiator = false;
  for (const ActorMolecule& mol : scenario.molecules) {
    const std::vector<Id> elig = eligible_initiators(mol);
    for (const Atom& atom : mol.atoms) {
      if (atom.reflex &&
          std::find(elig.begin(), elig.end(), atom.id) != elig.end()) {
        has_protected_initiator = true;
      }
    }
  }
  if (!has_protected_initiator) {
    throw ValidationFailure("scenario '" + scenario.name +
                            "' has no protected atom able to start a trial");
  }
}

void apply_scenario(const Scenario& scenario, RunConfig& config) {
  config.engine.t_steps = scenario.t_steps;
  config.env.obstructed = scenario.obstructed;
}

}  // namespace coevo

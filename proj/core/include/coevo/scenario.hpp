#pragma once

#include <string>
#include <vector>

#include "coevo/config.hpp"
#include "coevo/molecule.hpp"

namespace coevo {

// A shipped starting point: innate molecules and observers plus the trial
// settings they were designed for. Builders are deterministic — the same
// name and config always produce byte-identical populations.
struct Scenario {
  std::string name;
  std::vector<ActorMolecule> molecules;
  std::vector<Atom> games;
  int t_steps = 100;
  bool obstructed = false;
};

const std::vector<std::string>& scenario_names();

// Throws UnknownScenario for names outside the shipped set; every returned
// scenario passes population validation and has a protected initiator.
Scenario build_scenario(const std::string& name, const RunConfig& config);

// reaching_two_path with the controller's training skipped: the randomly
// weighted network barely moves the arm, so the search branch should win the
// path competition instead.
Scenario build_reaching_untrained(const RunConfig& config);

// The four single-edit variants of the elbow-exploration molecule:
//   1 watch the shoulder angle instead of the elbow angle
//   2 add a parallel error atom writing a second error key
//   3 flip the hill climber to minimize the error signal
//   4 drive the shoulder motor instead of the elbow motor
Scenario build_resistance_mutant(int which, const RunConfig& config);

// Full validation: atom/molecule/population invariants plus at least one
// protected atom eligible to start a trial. Throws ValidationFailure.
void validate_scenario(const Scenario& scenario);

// Copies the scenario's trial length and obstruction flag into the config.
void apply_scenario(const Scenario& scenario, RunConfig& config);

// Weight block of the offline-trained 4->16->2 reaching controller mapping
// (object x, object y, shoulder angle, elbow angle) to joint velocity
// commands. Trained once per process on generated kinematics data.
const std::vector<double>& reaching_policy_weights();

}  // namespace coevo

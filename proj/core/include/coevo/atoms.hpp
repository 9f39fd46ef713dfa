#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coevo/rng.hpp"
#include "coevo/working_memory.hpp"

namespace coevo {

// Actor computation kinds followed by game (observer) transform kinds.
enum class AtomKind {
  ForwardModel,
  SquaredError,
  StochasticHillClimber,
  MotorWriter,
  InverseModel,
  FeedForwardNet,
  MutualInfo,
  Accumulator,
  Terminator,
  AccumulateValue,
  MaximizeIsIdentity,
  NegateForMinimize,
  VarianceOverTrial,
  DistanceBetweenKeys,
  ChainOutput,
};

std::string_view kind_name(AtomKind kind);
AtomKind kind_from_name(std::string_view name);
bool is_game_kind(AtomKind kind);
const std::vector<AtomKind>& actor_kinds();
const std::vector<AtomKind>& game_kinds();

enum class ActivationKind { AlwaysOn, SignalTrue };

// SignalTrue atoms wake when inputs[input_index] holds a true signal; once
// awake they run every remaining step of the trial. AlwaysOn atoms run only
// when the engine selects them as the trial's initiator.
struct ActivationRule {
  ActivationKind kind = ActivationKind::AlwaysOn;
  int input_index = 0;
};

// One population member. Actor kinds write outputs[0] as their wake-signal
// key; game kinds have no outputs except ChainOutput, whose single output is
// the key it relays into. The reflex flag marks protected members (initial
// reflexes / innate games): they are never erased by selection and never
// mutated in place; copies do not inherit the flag.
struct Atom {
  Id id = 0;
  AtomKind kind = AtomKind::Accumulator;
  std::vector<double> params;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  ActivationRule activation;
  bool reflex = false;
};

// Arity contract per kind. data_out excludes the wake-signal slot; -1 means
// variable (at least one). params_max of -1 means the params tail holds
// network weights of validated length.
struct KindInfo {
  int data_in_min = 0;
  int data_in_max = 0;
  int data_out = 0;
  int params_min = 0;
  int params_max = 0;
};

const KindInfo& kind_info(AtomKind kind);

// Inputs excluding the activation-signal slot (in declaration order). The
// signal slot is consumed by the wake rule, not by the transfer function.
std::vector<std::string> data_inputs(const Atom& atom);
std::vector<std::string> data_outputs(const Atom& atom);

void validate_atom(const Atom& atom);

// --- shared two-layer tanh perceptron ------------------------------------
// Weight layout: W1 (hidden x n_in), b1 (hidden), W2 (n_out x hidden),
// b2 (n_out).
struct Mlp {
  int n_in = 0;
  int hidden = 0;
  int n_out = 0;
  std::vector<double> w;
};

int mlp_weight_count(int n_in, int hidden, int n_out);
void mlp_forward(const Mlp& net, const double* x, double* y);
void mlp_sgd(Mlp& net, const double* x, const double* target, double lr);

inline constexpr int kForwardModelWidth = 8;
inline constexpr int kInverseModelHidden = 16;
inline constexpr int kInverseModelWeights = 114;  // 4 -> 16 -> 2

// --- per-atom runtime state ------------------------------------------------
// Never serialized; rebuilt deterministically from the run seed and folded
// across trials by the engine.
struct AtomState {
  // ForwardModel: residual net plus the prediction staged for the next step.
  Mlp fm_net;
  bool fm_has_pending = false;
  double fm_pending = 0.0;
  bool fm_has_prev = false;
  double fm_prev_angle = 0.0;
  double fm_prev_cmd = 0.0;

  // StochasticHillClimber: best-so-far command vector, the candidate being
  // emitted, and the reward recorded when the best was adopted.
  std::vector<double> shc_best;
  std::vector<double> shc_cand;
  double shc_best_obj = 0.0;
  bool shc_has_best_obj = false;

  // MutualInfo sliding window of (x, y) pairs.
  std::vector<std::pair<double, double>> mi_buf;
  std::size_t mi_next = 0;

  // Accumulator.
  double acc_sum = 0.0;
};

AtomState make_atom_state(const Atom& atom, std::uint64_t seed);

struct StepEffect {
  // A step is miswired when a data input is absent, misshapen, or the
  // computation produced a non-finite number. Miswired steps write nothing
  // (wake signal included) and leave state untouched; the trial continues.
  bool miswired = false;
  bool terminate = false;
};

// Evaluates the wake rule against current memory. AlwaysOn reads true; the
// engine decides which AlwaysOn atom actually initiates the trial.
bool check_activation(const Atom& atom, const WorkingMemory& wm);

// Runs one active step: reads the data inputs, then on success writes every
// output (wake signal first).
StepEffect step_atom(const Atom& atom, AtomState& state, WorkingMemory& wm, Rng& rng);

// --- per-trial game observation ---------------------------------------------
// Games observe working memory once per step, after the actor pass. Absent
// inputs contribute 0. Terminal transforms accumulate a fitness component;
// ChainOutput relays its (sign-scaled) input into its output key instead.
struct GameTrialState {
  double accum = 0.0;
  std::vector<double> samples;  // VarianceOverTrial
};

void game_observe_step(const Atom& game, GameTrialState& state, WorkingMemory& wm);
bool game_is_terminal(const Atom& game);
double game_component(const Atom& game, const GameTrialState& state);

}  // namespace coevo

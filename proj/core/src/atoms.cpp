#include "coevo/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "coevo/errors.hpp"
#include "coevo/mutual_info.hpp"

namespace coevo {

namespace {

constexpr int kKindCount = 15;

constexpr std::string_view kKindNames[kKindCount] = {
    "ForwardModel",       "SquaredError",     "StochasticHillClimber",
    "MotorWriter",        "InverseModel",     "FeedForwardNet",
    "MutualInfo",         "Accumulator",      "Terminator",
    "AccumulateValue",    "MaximizeIsIdentity", "NegateForMinimize",
    "VarianceOverTrial",  "DistanceBetweenKeys", "ChainOutput",
};

// Params layouts:
//   ForwardModel          [lr]             outputs: prediction + observed echo
//   SquaredError          [mode]           mode >= 0.5 squares the difference
//   StochasticHillClimber [dim, sigma, p_worse, sign]
//   MotorWriter           [gain]
//   InverseModel          [lr, net(4->16->2) weights]
//   FeedForwardNet        [hidden, net(n_in->hidden->1) weights]
//   MutualInfo            [bins, window, x_lo, x_hi, y_lo, y_hi]
//   Accumulator           [decay]
//   Terminator            [threshold, sense]
//   game kinds            [sign]           +-1 multiplier on every increment
const KindInfo kInfos[kKindCount] = {
    {2, 2, 2, 1, 1},      // ForwardModel
    {2, 2, 1, 1, 1},      // SquaredError
    {1, 1, 1, 4, 4},      // StochasticHillClimber
    {1, 1, -1, 1, 1},     // MotorWriter
    {4, 4, 1, 115, 115},  // InverseModel
    {1, 4, 1, 2, -1},     // FeedForwardNet
    {2, 2, 1, 6, 6},      // MutualInfo
    {1, 1, 1, 1, 1},      // Accumulator
    {1, 1, 0, 2, 2},      // Terminator
    {1, 1, 0, 1, 1},      // AccumulateValue
    {1, 1, 0, 1, 1},      // MaximizeIsIdentity
    {1, 1, 0, 1, 1},      // NegateForMinimize
    {1, 1, 0, 1, 1},      // VarianceOverTrial
    {4, 4, 0, 1, 1},      // DistanceBetweenKeys
    {1, 1, 1, 1, 1},      // ChainOutput
};

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

std::optional<double> scalar_in(const WorkingMemory& wm, const std::string& key) {
  const WmEntry* e = wm.find(key);
  if (!e) return std::nullopt;
  return e->value.numeric().front();
}

void require(bool ok, const Atom& atom, const std::string& msg) {
  if (!ok)
    throw ValidationFailure("atom " + std::to_string(atom.id) + " (" +
                            std::string(kind_name(atom.kind)) + "): " + msg);
}

}  // namespace

std::string_view kind_name(AtomKind kind) { return kKindNames[static_cast<int>(kind)]; }

AtomKind kind_from_name(std::string_view name) {
  for (int i = 0; i < kKindCount; ++i)
    if (kKindNames[i] == name) return static_cast<AtomKind>(i);
  throw ValidationFailure("unknown atom kind '" + std::string(name) + "'");
}

bool is_game_kind(AtomKind kind) { return static_cast<int>(kind) >= 9; }

const std::vector<AtomKind>& actor_kinds() {
  static const std::vector<AtomKind> kinds = [] {
    std::vector<AtomKind> v;
    for (int i = 0; i < 9; ++i) v.push_back(static_cast<AtomKind>(i));
    return v;
  }();
  return kinds;
}

const std::vector<AtomKind>& game_kinds() {
  static const std::vector<AtomKind> kinds = [] {
    std::vector<AtomKind> v;
    for (int i = 9; i < kKindCount; ++i) v.push_back(static_cast<AtomKind>(i));
    return v;
  }();
  return kinds;
}

const KindInfo& kind_info(AtomKind kind) { return kInfos[static_cast<int>(kind)]; }

std::vector<std::string> data_inputs(const Atom& atom) {
  std::vector<std::string> out;
  for (int i = 0; i < static_cast<int>(atom.inputs.size()); ++i) {
    if (atom.activation.kind == ActivationKind::SignalTrue && i == atom.activation.input_index)
      continue;
    out.push_back(atom.inputs[i]);
  }
  return out;
}

std::vector<std::string> data_outputs(const Atom& atom) {
  if (is_game_kind(atom.kind) || atom.outputs.empty()) return {};
  return std::vector<std::string>(atom.outputs.begin() + 1, atom.outputs.end());
}

int mlp_weight_count(int n_in, int hidden, int n_out) {
  return hidden * n_in + hidden + n_out * hidden + n_out;
}

void mlp_forward(const Mlp& net, const double* x, double* y) {
  const double* w1 = net.w.data();
  const double* b1 = w1 + net.hidden * net.n_in;
  const double* w2 = b1 + net.hidden;
  const double* b2 = w2 + net.n_out * net.hidden;
  std::vector<double> h(net.hidden);
  for (int j = 0; j < net.hidden; ++j) {
    double s = b1[j];
    for (int i = 0; i < net.n_in; ++i) s += w1[j * net.n_in + i] * x[i];
    h[j] = std::tanh(s);
  }
  for (int k = 0; k < net.n_out; ++k) {
    double s = b2[k];
    for (int j = 0; j < net.hidden; ++j) s += w2[k * net.hidden + j] * h[j];
    y[k] = s;
  }
}

void mlp_sgd(Mlp& net, const double* x, const double* target, double lr) {
  double* w1 = net.w.data();
  double* b1 = w1 + net.hidden * net.n_in;
  double* w2 = b1 + net.hidden;
  double* b2 = w2 + net.n_out * net.hidden;
  std::vector<double> h(net.hidden), err(net.n_out);
  for (int j = 0; j < net.hidden; ++j) {
    double s = b1[j];
    for (int i = 0; i < net.n_in; ++i) s += w1[j * net.n_in + i] * x[i];
    h[j] = std::tanh(s);
  }
  bool finite = true;
  for (int k = 0; k < net.n_out; ++k) {
    double s = b2[k];
    for (int j = 0; j < net.hidden; ++j) s += w2[k * net.hidden + j] * h[j];
    err[k] = s - target[k];
    if (!std::isfinite(err[k])) finite = false;
  }
  if (!finite) return;  // refuse to propagate a blow-up into the weights
  std::vector<double> dpre(net.hidden, 0.0);
  for (int j = 0; j < net.hidden; ++j) {
    double dh = 0.0;
    for (int k = 0; k < net.n_out; ++k) dh += err[k] * w2[k * net.hidden + j];
    dpre[j] = dh * (1.0 - h[j] * h[j]);
  }
  for (int k = 0; k < net.n_out; ++k) {
    for (int j = 0; j < net.hidden; ++j) w2[k * net.hidden + j] -= lr * err[k] * h[j];
    b2[k] -= lr * err[k];
  }
  for (int j = 0; j < net.hidden; ++j) {
    for (int i = 0; i < net.n_in; ++i) w1[j * net.n_in + i] -= lr * dpre[j] * x[i];
    b1[j] -= lr * dpre[j];
  }
}

void validate_atom(const Atom& atom) {
  const int ki = static_cast<int>(atom.kind);
  require(ki >= 0 && ki < kKindCount, atom, "kind out of range");
  const KindInfo& info = kind_info(atom.kind);

  for (const std::string& k : atom.inputs) key_role(k);
  for (const std::string& k : atom.outputs) key_role(k);
  for (double p : atom.params)
    require(std::isfinite(p), atom, "non-finite parameter");

  if (atom.activation.kind == ActivationKind::SignalTrue) {
    require(atom.activation.input_index >= 0 &&
                atom.activation.input_index < static_cast<int>(atom.inputs.size()),
            atom, "wake-signal input index out of range");
  }

  const int n_data_in = static_cast<int>(data_inputs(atom).size());
  require(n_data_in >= info.data_in_min && n_data_in <= info.data_in_max, atom,
          "expected " + std::to_string(info.data_in_min) + ".." +
              std::to_string(info.data_in_max) + " data inputs, got " +
              std::to_string(n_data_in));

  const int np = static_cast<int>(atom.params.size());
  if (info.params_max >= 0)
    require(np >= info.params_min && np <= info.params_max, atom,
            "expected " + std::to_string(info.params_min) + ".." +
                std::to_string(info.params_max) + " params, got " + std::to_string(np));
  else
    require(np >= info.params_min, atom, "too few params");

  if (is_game_kind(atom.kind)) {
    if (atom.kind == AtomKind::ChainOutput) {
      require(atom.outputs.size() == 1, atom, "relay transforms write exactly one key");
      require(key_role(atom.outputs[0]) == KeyRole::Internal, atom,
              "relay output must be a wm/ key");
    } else {
      require(atom.outputs.empty(), atom, "terminal game transforms have no outputs");
    }
    require(atom.activation.kind == ActivationKind::AlwaysOn, atom,
            "game transforms take no wake rule");
    require(atom.params[0] == 1.0 || atom.params[0] == -1.0, atom, "sign must be +-1");
    return;
  }

  if (info.data_out >= 0)
    require(static_cast<int>(atom.outputs.size()) == 1 + info.data_out, atom,
            "expected " + std::to_string(1 + info.data_out) + " outputs, got " +
                std::to_string(atom.outputs.size()));
  else
    require(atom.outputs.size() >= 2, atom, "expected a wake key plus data outputs");
  require(key_role(atom.outputs[0]) == KeyRole::Internal, atom,
          "wake-signal output must be a wm/ key");
  for (std::size_t i = 1; i < atom.outputs.size(); ++i)
    require(key_role(atom.outputs[i]) != KeyRole::Sensor, atom,
            "atoms cannot write sensor keys");

  switch (atom.kind) {
    case AtomKind::ForwardModel:
      require(atom.params[0] > 0.0, atom, "learning rate must be positive");
      break;
    case AtomKind::StochasticHillClimber:
      require(is_integral(atom.params[0]) && atom.params[0] >= 1.0, atom,
              "dim must be a positive integer");
      require(atom.params[1] >= 0.0, atom, "sigma must be non-negative");
      require(atom.params[2] >= 0.0 && atom.params[2] <= 1.0, atom,
              "worse-acceptance probability must lie in [0,1]");
      require(atom.params[3] == 1.0 || atom.params[3] == -1.0, atom, "sign must be +-1");
      break;
    case AtomKind::InverseModel:
      require(np == 1 + mlp_weight_count(4, kInverseModelHidden, 2), atom,
              "weight block must match the 4->16->2 layout");
      break;
    case AtomKind::FeedForwardNet: {
      require(is_integral(atom.params[0]) && atom.params[0] >= 1.0, atom,
              "hidden width must be a positive integer");
      const int hidden = static_cast<int>(atom.params[0]);
      require(np == 1 + mlp_weight_count(n_data_in, hidden, 1), atom,
              "weight block must match the declared layout");
      break;
    }
    case AtomKind::MutualInfo:
      require(is_integral(atom.params[0]) && atom.params[0] >= 2.0, atom,
              "bins must be an integer >= 2");
      require(is_integral(atom.params[1]) && atom.params[1] >= 2.0, atom,
              "window must be an integer >= 2");
      require(atom.params[3] > atom.params[2], atom, "x range must be non-degenerate");
      require(atom.params[5] > atom.params[4], atom, "y range must be non-degenerate");
      break;
    case AtomKind::Accumulator:
      require(atom.params[0] >= 0.0 && atom.params[0] <= 1.0, atom,
              "decay must lie in [0,1]");
      break;
    case AtomKind::Terminator:
      require(atom.params[1] == 1.0 || atom.params[1] == -1.0, atom, "sense must be +-1");
      break;
    default:
      break;
  }
}

AtomState make_atom_state(const Atom& atom, std::uint64_t seed) {
  AtomState st;
  Rng rng = make_rng(seed);
  switch (atom.kind) {
    case AtomKind::ForwardModel: {
      st.fm_net.n_in = 2;
      st.fm_net.hidden = kForwardModelWidth;
      st.fm_net.n_out = 1;
      st.fm_net.w.assign(mlp_weight_count(2, kForwardModelWidth, 1), 0.0);
      // Hidden layer gets small random weights; the output layer starts at
      // zero so the initial prediction is exactly the identity map.
      std::uniform_real_distribution<double> u(-0.1, 0.1);
      const int n_hidden_block = kForwardModelWidth * 2 + kForwardModelWidth;
      for (int i = 0; i < n_hidden_block; ++i) st.fm_net.w[i] = u(rng);
      break;
    }
    case AtomKind::StochasticHillClimber: {
      const int dim = static_cast<int>(atom.params[0]);
      const double sigma = atom.params[1];
      st.shc_best.assign(dim, 0.0);
      st.shc_cand.assign(dim, 0.0);
      std::normal_distribution<double> n(0.0, 1.0);
      for (int i = 0; i < dim; ++i) st.shc_cand[i] = sigma * n(rng);
      break;
    }
    case AtomKind::MutualInfo:
      st.mi_buf.reserve(static_cast<std::size_t>(atom.params[1]));
      break;
    default:
      break;
  }
  return st;
}

bool check_activation(const Atom& atom, const WorkingMemory& wm) {
  if (atom.activation.kind == ActivationKind::AlwaysOn) return true;
  const WmEntry* e = wm.find(atom.inputs[atom.activation.input_index]);
  return e && e->value.kind() == ValueKind::Signal && e->value.as_signal();
}

StepEffect step_atom(const Atom& atom, AtomState& st, WorkingMemory& wm, Rng& rng) {
  if (is_game_kind(atom.kind))
    throw ValidationFailure("game transforms observe trials; they do not step");

  StepEffect eff;
  const std::vector<std::string> din = data_inputs(atom);
  const auto miswire = [&eff] {
    eff.miswired = true;
    return eff;
  };
  const auto wake = [&] {
    wm.write(atom.outputs[0], Value::signal(true), WriterRole::Actor, atom.id);
  };

  switch (atom.kind) {
    case AtomKind::ForwardModel: {
      const auto angle = scalar_in(wm, din[0]);
      const auto cmd = scalar_in(wm, din[1]);
      if (!angle || !cmd) return miswire();
      // Emit the prediction staged for this step alongside an echo of the
      // observation it targets, so downstream error atoms compare like with
      // like whatever key this model happens to watch.
      const double pred = st.fm_has_pending ? st.fm_pending : *angle;
      wake();
      wm.write(atom.outputs[1], Value::scalar(pred), WriterRole::Actor, atom.id);
      wm.write(atom.outputs[2], Value::scalar(*angle), WriterRole::Actor, atom.id);
      if (st.fm_has_prev) {
        const double x[2] = {st.fm_prev_angle, st.fm_prev_cmd};
        const double target = *angle - st.fm_prev_angle;
        mlp_sgd(st.fm_net, x, &target, atom.params[0]);
      }
      const double x[2] = {*angle, *cmd};
      double g = 0.0;
      mlp_forward(st.fm_net, x, &g);
      // A single step can change the angle by at most v_max*dt, so the
      // residual is clamped to a safely generous +-1.
      st.fm_pending = *angle + std::clamp(g, -1.0, 1.0);
      st.fm_has_pending = true;
      st.fm_prev_angle = *angle;
      st.fm_prev_cmd = *cmd;
      st.fm_has_prev = true;
      break;
    }
    case AtomKind::SquaredError: {
      const auto a = scalar_in(wm, din[0]);
      const auto b = scalar_in(wm, din[1]);
      if (!a || !b) return miswire();
      const double d = *a - *b;
      const double out = atom.params[0] >= 0.5 ? d * d : d;
      if (!std::isfinite(out)) return miswire();
      wake();
      wm.write(atom.outputs[1], Value::scalar(out), WriterRole::Actor, atom.id);
      break;
    }
    case AtomKind::StochasticHillClimber: {
      const auto reward = scalar_in(wm, din[0]);
      if (!reward) return miswire();
      const double sigma = atom.params[1];
      const double p_worse = atom.params[2];
      const double sign = atom.params[3];
      // Credit the arriving reward to the candidate emitted so far; restart
      // from the best unless a worse-move exploration fires.
      if (!st.shc_has_best_obj || sign * *reward > sign * st.shc_best_obj) {
        st.shc_best = st.shc_cand;
        st.shc_best_obj = *reward;
        st.shc_has_best_obj = true;
      }
      std::uniform_real_distribution<double> u(0.0, 1.0);
      if (u(rng) >= p_worse) st.shc_cand = st.shc_best;
      std::normal_distribution<double> n(0.0, 1.0);
      for (double& c : st.shc_cand) c = std::clamp(c + sigma * n(rng), -1e6, 1e6);
      wake();
      wm.write(atom.outputs[1], Value::vec(st.shc_cand), WriterRole::Actor, atom.id);
      break;
    }
    case AtomKind::MotorWriter: {
      const WmEntry* e = wm.find(din[0]);
      if (!e) return miswire();
      const std::vector<double> v = e->value.numeric();
      const std::size_t n_out = atom.outputs.size() - 1;
      if (v.size() < n_out) return miswire();
      const double gain = atom.params[0];
      for (std::size_t j = 0; j < n_out; ++j)
        if (!std::isfinite(gain * v[j])) return miswire();
      wake();
      for (std::size_t j = 0; j < n_out; ++j)
        wm.write(atom.outputs[1 + j], Value::scalar(gain * v[j]), WriterRole::Actor,
                 atom.id);
      break;
    }
    case AtomKind::InverseModel: {
      double in[4];
      for (int i = 0; i < 4; ++i) {
        const auto v = scalar_in(wm, din[i]);
        if (!v) return miswire();
        in[i] = *v;
      }
      Mlp net{4, kInverseModelHidden, 2,
              std::vector<double>(atom.params.begin() + 1, atom.params.end())};
      double cmd[2] = {0.0, 0.0};
      mlp_forward(net, in, cmd);
      if (!std::isfinite(cmd[0]) || !std::isfinite(cmd[1])) return miswire();
      wake();
      wm.write(atom.outputs[1], Value::vec({cmd[0], cmd[1]}), WriterRole::Actor, atom.id);
      break;
    }
    case AtomKind::FeedForwardNet: {
      std::vector<double> in;
      in.reserve(din.size());
      for (const std::string& k : din) {
        const auto v = scalar_in(wm, k);
        if (!v) return miswire();
        in.push_back(*v);
      }
      const int hidden = static_cast<int>(atom.params[0]);
      Mlp net{static_cast<int>(din.size()), hidden, 1,
              std::vector<double>(atom.params.begin() + 1, atom.params.end())};
      double out = 0.0;
      mlp_forward(net, in.data(), &out);
      if (!std::isfinite(out)) return miswire();
      wake();
      wm.write(atom.outputs[1], Value::scalar(out), WriterRole::Actor, atom.id);
      break;
    }
    case AtomKind::MutualInfo: {
      const int window = static_cast<int>(atom.params[1]);
      const auto x = scalar_in(wm, din[0]);
      const auto y = scalar_in(wm, din[1]);
      if (!x || !y) return miswire();
      if (static_cast<int>(st.mi_buf.size()) < window) {
        st.mi_buf.emplace_back(*x, *y);
      } else {
        st.mi_buf[st.mi_next] = {*x, *y};
        st.mi_next = (st.mi_next + 1) % st.mi_buf.size();
      }
      // The estimate is only meaningful over a full window; emit 0 until the
      // ring buffer has seen `window` samples.
      double out = 0.0;
      if (static_cast<int>(st.mi_buf.size()) >= window) {
        MiEstimator est(static_cast<int>(atom.params[0]), atom.params[2], atom.params[3],
                        atom.params[4], atom.params[5]);
        for (const auto& [px, py] : st.mi_buf) est.add(px, py);
        out = est.estimate_bits();
      }
      wake();
      wm.write(atom.outputs[1], Value::scalar(out), WriterRole::Actor, atom.id);
      break;
    }
    case AtomKind::Accumulator: {
      const auto v = scalar_in(wm, din[0]);
      if (!v) return miswire();
      const double next = atom.params[0] * st.acc_sum + *v;
      if (!std::isfinite(next)) return miswire();
      st.acc_sum = next;
      wake();
      wm.write(atom.outputs[1], Value::scalar(st.acc_sum), WriterRole::Actor, atom.id);
      break;
    }
    case AtomKind::Terminator: {
      const auto v = scalar_in(wm, din[0]);
      if (!v) return miswire();
      wake();
      const bool hit = atom.params[1] > 0.0 ? *v >= atom.params[0] : *v <= atom.params[0];
      if (hit) eff.terminate = true;
      break;
    }
    default:
      break;
  }
  return eff;
}

namespace {

// First numeric component of the observed key; absent keys contribute 0.
double observed(const WorkingMemory& wm, const std::string& key) {
  const WmEntry* e = wm.find(key);
  return e ? e->value.numeric().front() : 0.0;
}

}  // namespace

void game_observe_step(const Atom& game, GameTrialState& gs, WorkingMemory& wm) {
  const double sign = game.params[0];
  switch (game.kind) {
    case AtomKind::AccumulateValue:
    case AtomKind::MaximizeIsIdentity:
      gs.accum += sign * observed(wm, game.inputs[0]);
      break;
    case AtomKind::NegateForMinimize:
      gs.accum += sign * -observed(wm, game.inputs[0]);
      break;
    case AtomKind::VarianceOverTrial:
      gs.samples.push_back(sign * observed(wm, game.inputs[0]));
      break;
    case AtomKind::DistanceBetweenKeys: {
      const double dx = observed(wm, game.inputs[0]) - observed(wm, game.inputs[2]);
      const double dy = observed(wm, game.inputs[1]) - observed(wm, game.inputs[3]);
      gs.accum += sign * -std::sqrt(dx * dx + dy * dy);
      break;
    }
    case AtomKind::ChainOutput: {
      const double v = sign * observed(wm, game.inputs[0]);
      if (std::isfinite(v))
        wm.write(game.outputs[0], Value::scalar(v), WriterRole::Game, game.id);
      break;
    }
    default:
      throw ValidationFailure("actor atoms step; they do not observe");
  }
}

bool game_is_terminal(const Atom& game) { return game.kind != AtomKind::ChainOutput; }

double game_component(const Atom& game, const GameTrialState& gs) {
  if (game.kind == AtomKind::VarianceOverTrial) {
    const std::size_t n = gs.samples.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double s : gs.samples) mean += s;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double s : gs.samples) ss += (s - mean) * (s - mean);
    return ss / static_cast<double>(n - 1);
  }
  return gs.accum;
}

}  // namespace coevo

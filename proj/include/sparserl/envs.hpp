// Self-contained continuous-control environments with a uniform contract.
// Termination and time-limit truncation are reported as distinct signals so
// the agent can bootstrap through truncations.
#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparserl/math.hpp"
#include "sparserl/rng.hpp"

namespace sparserl {

struct EnvSpec {
  int state_dim = 0;
  int action_dim = 0;
  double max_action = 0.0;
  long step_limit = 0;
};

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual EnvSpec spec() const = 0;
  virtual std::vector<double> reset(Rng& rng) = 0;
  virtual StepResult step(const std::vector<double>& action) = 0;
  virtual std::unique_ptr<Env> clone_fresh() const = 0;
};

namespace detail {
inline double wrap_pi(double x) {
  constexpr double kPi = 3.1415926535897932384626433832795;
  x = std::fmod(x + kPi, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  return x - kPi;
}
}  // namespace detail

// Torque-limited pendulum swing-up. State observed as (cos θ, sin θ, θ̇).
// Never terminates; truncates after 200 steps.
class Pendulum final : public Env {
 public:
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr long kStepLimit = 200;

  EnvSpec spec() const override { return {3, 1, kMaxTorque, kStepLimit}; }

  std::vector<double> reset(Rng& rng) override {
    constexpr double kPi = 3.1415926535897932384626433832795;
    theta_ = rng.uniform(-kPi, kPi);
    theta_dot_ = rng.uniform(-1.0, 1.0);
    steps_ = 0;
    done_ = false;
    return observation();
  }

  StepResult step(const std::vector<double>& action) override {
    require_live(action, 1);
    const double u = clip(action[0], -kMaxTorque, kMaxTorque);
    const double accel = 3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                         3.0 / (kMass * kLength * kLength) * u;
    theta_dot_ = clip(theta_dot_ + accel * kDt, -kMaxSpeed, kMaxSpeed);
    theta_ += theta_dot_ * kDt;
    ++steps_;
    const double angle = detail::wrap_pi(theta_);
    StepResult res;
    res.reward =
        -(angle * angle + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);
    res.next_state = observation();
    res.truncated = steps_ >= kStepLimit;
    done_ = res.terminal || res.truncated;
    return res;
  }

  std::unique_ptr<Env> clone_fresh() const override {
    return std::make_unique<Pendulum>();
  }

  // Test hook.
  void set_state(double theta, double theta_dot) {
    theta_ = theta;
    theta_dot_ = theta_dot;
    steps_ = 0;
    done_ = false;
  }

 private:
  std::vector<double> observation() const {
    return {std::cos(theta_), std::sin(theta_), theta_dot_};
  }

  void require_live(const std::vector<double>& action, int dim) const {
    if (done_)
      throw std::logic_error("Env::step: episode finished, reset required");
    if (static_cast<int>(action.size()) != dim)
      throw std::invalid_argument("Env::step: action dimension mismatch");
  }

  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  long steps_ = 0;
  bool done_ = true;
};

// Continuous-action mountain car. Terminates with a +100 bonus at the goal
// position; otherwise each step costs 0.1 u². Truncates after 999 steps.
class MountainCar final : public Env {
 public:
  static constexpr double kPower = 0.0015;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kMinPos = -1.2;
  static constexpr double kMaxPos = 0.6;
  static constexpr double kGoalPos = 0.45;
  static constexpr double kMaxAction = 1.0;
  static constexpr long kStepLimit = 999;

  EnvSpec spec() const override { return {2, 1, kMaxAction, kStepLimit}; }

  std::vector<double> reset(Rng& rng) override {
    position_ = rng.uniform(-0.6, -0.4);
    velocity_ = 0.0;
    steps_ = 0;
    done_ = false;
    return {position_, velocity_};
  }

  StepResult step(const std::vector<double>& action) override {
    if (done_)
      throw std::logic_error("Env::step: episode finished, reset required");
    if (action.size() != 1)
      throw std::invalid_argument("Env::step: action dimension mismatch");
    const double u = clip(action[0], -kMaxAction, kMaxAction);
    velocity_ = clip(velocity_ + u * kPower - 0.0025 * std::cos(3.0 * position_),
                     -kMaxSpeed, kMaxSpeed);
    position_ = clip(position_ + velocity_, kMinPos, kMaxPos);
    ++steps_;
    StepResult res;
    res.terminal = position_ >= kGoalPos;
    res.reward = -0.1 * u * u + (res.terminal ? 100.0 : 0.0);
    res.next_state = {position_, velocity_};
    res.truncated = !res.terminal && steps_ >= kStepLimit;
    done_ = res.terminal || res.truncated;
    return res;
  }

  std::unique_ptr<Env> clone_fresh() const override {
    return std::make_unique<MountainCar>();
  }

  // Test hook.
  void set_state(double position, double velocity) {
    position_ = position;
    velocity_ = velocity;
    steps_ = 0;
    done_ = false;
  }

 private:
  double position_ = 0.0;
  double velocity_ = 0.0;
  long steps_ = 0;
  bool done_ = true;
};

inline std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "mountaincar") return std::make_unique<MountainCar>();
  throw std::runtime_error("unknown environment '" + name +
                           "' (expected pendulum or mountaincar)");
}

}  // namespace sparserl

// Twin-delayed deterministic policy gradient with optional sparse networks
// and SET-style topology evolution. One agent owns its networks, optimizer
// state and per-layer target budgets; a training loop drives it one
// transition at a time.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sparserl/adam.hpp"
#include "sparserl/envs.hpp"
#include "sparserl/evolution.hpp"
#include "sparserl/net.hpp"
#include "sparserl/replay.hpp"
#include "sparserl/rng.hpp"

namespace sparserl {

enum class Mode { kDense, kStaticSparse, kDynamicSparse };

inline std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kDense: return "dense";
    case Mode::kStaticSparse: return "static";
    case Mode::kDynamicSparse: return "dynamic";
  }
  return "?";
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "dense") return Mode::kDense;
  if (s == "static") return Mode::kStaticSparse;
  if (s == "dynamic") return Mode::kDynamicSparse;
  throw std::runtime_error("unknown mode '" + s +
                           "' (expected dense, static or dynamic)");
}

struct AgentConfig {
  Mode mode = Mode::kDynamicSparse;
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;         // d
  long evolution_period = 1000; // e
  double evolution_fraction = 0.05;  // eta
  double lambda1 = 7.0;
  double lambda2 = 64.0;
  double expl_noise = 0.1;    // sigma, scaled by max_action
  double target_noise = 0.2;  // sigma~, unscaled
  double noise_clip = 0.5;    // c, unscaled
  int batch_size = 100;
  long total_steps = 30000;
  long warmup_steps = 1000;
  double learning_rate = 1e-3;
  double weight_decay = 2e-4;
  int hidden_units = 256;
  double max_action = 1.0;

  void validate() const {
    auto fail = [](const std::string& what) {
      throw std::runtime_error("config: " + what);
    };
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must be in (0, 1]");
    if (!(tau > 0.0 && tau <= 1.0)) fail("tau must be in (0, 1]");
    if (policy_delay < 1) fail("d (policy delay) must be >= 1");
    if (evolution_period < 1) fail("e (evolution period) must be >= 1");
    if (evolution_period % policy_delay != 0)
      fail("e must be a multiple of d so actor evolution can fire");
    if (!(evolution_fraction >= 0.0 && evolution_fraction < 1.0))
      fail("eta must be in [0, 1)");
    if (mode == Mode::kDense && evolution_fraction != 0.0)
      fail("eta must be 0 in dense mode");
    if (!(noise_clip > 0.0)) fail("noise_clip must be positive");
    if (expl_noise < 0.0) fail("sigma must be non-negative");
    if (target_noise < 0.0) fail("target_sigma must be non-negative");
    if (lambda1 < 0.0) fail("lambda1 must be non-negative");
    if (lambda2 < 0.0) fail("lambda2 must be non-negative");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (total_steps < 1) fail("steps must be >= 1");
    if (warmup_steps < 0) fail("warmup must be >= 0");
    if (!(learning_rate > 0.0)) fail("lr must be positive");
    if (weight_decay < 0.0) fail("weight_decay must be non-negative");
    if (hidden_units < 1) fail("hidden must be >= 1");
    if (!(max_action > 0.0)) fail("max_action must be positive");
  }
};

struct StepLog {
  long update = 0;  // training-update index, 1-based
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  bool actor_updated = false;
  double actor_objective = 0.0;  // mean Q1(s, pi(s)) before the update
  bool targets_updated = false;
  bool evolved = false;
  std::size_t evolution_moves = 0;
};

class Td3Agent {
 public:
  // Network construction order (draw order): critic1, critic2, actor;
  // targets start as exact copies. In dense mode no mask sampling occurs.
  Td3Agent(AgentConfig cfg, EnvSpec env, Rng& rng)
      : cfg_(cfg), env_(env) {
    cfg_.max_action = env.max_action;
    cfg_.validate();
    const bool dense = cfg_.mode == Mode::kDense;
    critic1_ = make_critic(env.state_dim, env.action_dim, cfg_.hidden_units,
                           dense, cfg_.lambda1, cfg_.lambda2, rng);
    critic2_ = make_critic(env.state_dim, env.action_dim, cfg_.hidden_units,
                           dense, cfg_.lambda1, cfg_.lambda2, rng);
    actor_ = make_actor(env.state_dim, env.action_dim, cfg_.hidden_units,
                        env.max_action, dense, cfg_.lambda1, cfg_.lambda2, rng);
    target_critic1_ = critic1_;
    target_critic2_ = critic2_;
    target_actor_ = actor_;
    critic1_opt_ = AdamState::like(critic1_);
    critic2_opt_ = AdamState::like(critic2_);
    actor_opt_ = AdamState::like(actor_);
    critic_budgets_ = layer_counts(critic1_);
    actor_budgets_ = layer_counts(actor_);
  }

  const AgentConfig& config() const { return cfg_; }
  const EnvSpec& env_spec() const { return env_; }
  long updates() const { return updates_; }

  const Mlp& actor() const { return actor_; }
  const Mlp& critic1() const { return critic1_; }
  const Mlp& critic2() const { return critic2_; }
  const Mlp& target_actor() const { return target_actor_; }
  const Mlp& target_critic1() const { return target_critic1_; }
  const Mlp& target_critic2() const { return target_critic2_; }
  const AdamState& actor_opt() const { return actor_opt_; }
  const AdamState& critic1_opt() const { return critic1_opt_; }
  const AdamState& critic2_opt() const { return critic2_opt_; }
  const std::vector<std::size_t>& actor_budgets() const { return actor_budgets_; }
  const std::vector<std::size_t>& critic_budgets() const { return critic_budgets_; }

  // Warmup: uniform action per dimension. Afterwards: pi(s) plus Gaussian
  // exploration noise scaled by max_action, clipped to action bounds.
  std::vector<double> select_action(const std::vector<double>& state, Rng& rng,
                                    bool warmup) const {
    const double hi = cfg_.max_action;
    std::vector<double> a(env_.action_dim);
    if (warmup) {
      for (int i = 0; i < env_.action_dim; ++i) a[i] = rng.uniform(-hi, hi);
      return a;
    }
    a = actor_.forward1(state);
    const double noise_std = cfg_.expl_noise * hi;
    for (int i = 0; i < env_.action_dim; ++i)
      a[i] = clip(a[i] + rng.normal(0.0, noise_std), -hi, hi);
    return a;
  }

  // y = r + gamma * (1 - done) * min_i Q'_i(s', pi'(s') + clipped noise).
  void compute_target(const Batch& batch, Rng& rng, std::vector<double>& y) {
    const int n = batch.size();
    target_actor_.forward(batch.next_states, ws_target_actor_);
    next_actions_ = target_actor_.output(ws_target_actor_);
    const double hi = cfg_.max_action;
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < env_.action_dim; ++r) {
        const double eps = clip(rng.normal(0.0, cfg_.target_noise),
                                -cfg_.noise_clip, cfg_.noise_clip);
        next_actions_.at(r, c) = clip(next_actions_.at(r, c) + eps, -hi, hi);
      }
    }
    concat_rows(batch.next_states, next_actions_, sa_next_);
    target_critic1_.forward(sa_next_, ws_target_c1_);
    target_critic2_.forward(sa_next_, ws_target_c2_);
    const Matrix& q1 = target_critic1_.output(ws_target_c1_);
    const Matrix& q2 = target_critic2_.output(ws_target_c2_);
    y.resize(n);
    for (int c = 0; c < n; ++c) {
      const double q = std::min(q1.at(0, c), q2.at(0, c));
      y[c] = batch.rewards[c] + cfg_.gamma * (1.0 - batch.done[c]) * q;
    }
  }

  // One Adam step per critic on the mean-squared TD error; returns the two
  // pre-update losses.
  std::pair<double, double> update_critics(const Batch& batch,
                                           const std::vector<double>& y) {
    concat_rows(batch.states, batch.actions, sa_);
    const double l1 = critic_step(critic1_, critic1_opt_, ws_c1_, y);
    const double l2 = critic_step(critic2_, critic2_opt_, ws_c2_, y);
    return {l1, l2};
  }

  // Deterministic policy gradient ascent on mean Q1(s, pi(s)); critic
  // parameters stay untouched. Returns the pre-update objective.
  double update_actor(const Batch& batch) {
    const int n = batch.size();
    actor_.forward(batch.states, ws_actor_);
    concat_rows(batch.states, actor_.output(ws_actor_), sa_pi_);
    critic1_.forward(sa_pi_, ws_c1_pi_);
    const Matrix& q = critic1_.output(ws_c1_pi_);
    const double objective = sum_n(q.row(0), n) / static_cast<double>(n);
    dq_.resize(1, n);
    const double coef = 1.0 / static_cast<double>(n);
    for (int c = 0; c < n; ++c) dq_.at(0, c) = coef;
    critic1_.backward(ws_c1_pi_, dq_, nullptr, &dsa_);
    dactor_out_.resize(env_.action_dim, n);
    for (int r = 0; r < env_.action_dim; ++r) {
      const double* src = dsa_.row(env_.state_dim + r);
      double* dst = dactor_out_.row(r);
      for (int c = 0; c < n; ++c) dst[c] = -src[c];
    }
    actor_.backward(ws_actor_, dactor_out_, &actor_grads_, nullptr);
    adam_step(actor_, actor_opt_, actor_grads_, cfg_.learning_rate,
              cfg_.weight_decay);
    return objective;
  }

  // Polyak update over the union of current and target active sets (absent
  // positions count as zero), then per-layer budget pruning so each target
  // layer returns to its initial connection count.
  void soft_update_targets() {
    soft_update_net(critic1_, target_critic1_, critic_budgets_);
    soft_update_net(critic2_, target_critic2_, critic_budgets_);
    soft_update_net(actor_, target_actor_, actor_budgets_);
  }

  EvolutionDelta evolve_critics(Rng& rng) {
    EvolutionDelta delta;
    delta.layers.push_back(evolve_net_layer(critic1_, critic1_opt_, 0, rng));
    delta.layers.push_back(evolve_net_layer(critic1_, critic1_opt_, 1, rng));
    delta.layers.push_back(evolve_net_layer(critic2_, critic2_opt_, 0, rng));
    delta.layers.push_back(evolve_net_layer(critic2_, critic2_opt_, 1, rng));
    return delta;
  }

  EvolutionDelta evolve_actor(Rng& rng) {
    EvolutionDelta delta;
    delta.layers.push_back(evolve_net_layer(actor_, actor_opt_, 0, rng));
    delta.layers.push_back(evolve_net_layer(actor_, actor_opt_, 1, rng));
    return delta;
  }

  // One full loop body: store the transition, sample a batch, update critics,
  // evolve on schedule, then (every d updates) update the actor, evolve it on
  // schedule and soft-update the targets.
  StepLog train_iteration(ReplayBuffer& buffer, Transition transition,
                          Rng& rng) {
    buffer.store(std::move(transition));
    StepLog log;
    ++updates_;
    log.update = updates_;
    buffer.sample_into(static_cast<std::size_t>(cfg_.batch_size), rng, batch_);
    compute_target(batch_, rng, y_);
    auto [l1, l2] = update_critics(batch_, y_);
    log.critic1_loss = l1;
    log.critic2_loss = l2;
    const bool dynamic = cfg_.mode == Mode::kDynamicSparse;
    const bool evolve_now = dynamic && updates_ % cfg_.evolution_period == 0;
    if (evolve_now) {
      EvolutionDelta delta = evolve_critics(rng);
      log.evolved = true;
      log.evolution_moves += delta.moves();
    }
    if (updates_ % cfg_.policy_delay == 0) {
      log.actor_objective = update_actor(batch_);
      log.actor_updated = true;
      if (evolve_now) {
        EvolutionDelta delta = evolve_actor(rng);
        log.evolution_moves += delta.moves();
      }
      soft_update_targets();
      log.targets_updated = true;
    }
    return log;
  }

 private:
  static std::vector<std::size_t> layer_counts(const Mlp& net) {
    std::vector<std::size_t> counts(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l)
      counts[l] = net.layer(l).mask().count();
    return counts;
  }

  static void concat_rows(const Matrix& top, const Matrix& bottom, Matrix& out) {
    out.resize(top.rows + bottom.rows, top.cols);
    std::copy(top.data.begin(), top.data.end(), out.data.begin());
    std::copy(bottom.data.begin(), bottom.data.end(),
              out.data.begin() + top.data.size());
  }

  double critic_step(Mlp& critic, AdamState& opt, Workspace& ws,
                     const std::vector<double>& y) {
    const int n = sa_.cols;
    critic.forward(sa_, ws);
    const Matrix& q = critic.output(ws);
    double loss_acc = 0.0;
    for (int c = 0; c < n; ++c) {
      const double diff = y[c] - q.at(0, c);
      loss_acc += diff * diff;
    }
    const double loss = loss_acc / static_cast<double>(n);
    dq_.resize(1, n);
    const double coef = 2.0 / static_cast<double>(n);
    for (int c = 0; c < n; ++c) dq_.at(0, c) = coef * (q.at(0, c) - y[c]);
    critic.backward(ws, dq_, &critic_grads_, nullptr);
    adam_step(critic, opt, critic_grads_, cfg_.learning_rate, cfg_.weight_decay);
    return loss;
  }

  LayerDelta evolve_net_layer(Mlp& net, AdamState& opt, std::size_t l,
                              Rng& rng) {
    LayerDelta delta = evolve_layer(net.mutable_layer(l), opt.layers[l],
                                    cfg_.evolution_fraction, rng);
    return delta;
  }

  void soft_update_net(const Mlp& current, Mlp& target,
                       const std::vector<std::size_t>& budgets) {
    const double tau = cfg_.tau;
    for (std::size_t l = 0; l < current.layer_count(); ++l) {
      const SparseLayer& cur = current.layer(l);
      SparseLayer& tgt = target.mutable_layer(l);
      merge_soft(cur, tgt, tau);
      prune_to_budget(tgt, budgets[l]);
      auto& tb = tgt.bias();
      const auto& cb = cur.bias();
      for (std::size_t k = 0; k < tb.size(); ++k)
        tb[k] = tau * cb[k] + (1.0 - tau) * tb[k];
    }
  }

  static void merge_soft(const SparseLayer& cur, SparseLayer& tgt, double tau) {
    const auto& ck = cur.mask().keys();
    const auto& tk = tgt.mask().keys();
    const auto& cw = cur.weights();
    const auto& tw = tgt.weights();
    std::vector<std::uint64_t> keys;
    std::vector<double> w;
    keys.reserve(ck.size() + tk.size());
    w.reserve(ck.size() + tk.size());
    std::size_t i = 0, j = 0;
    while (i < ck.size() || j < tk.size()) {
      double cv = 0.0, tv = 0.0;
      std::uint64_t key;
      if (j >= tk.size() || (i < ck.size() && ck[i] < tk[j])) {
        key = ck[i];
        cv = cw[i];
        ++i;
      } else if (i >= ck.size() || tk[j] < ck[i]) {
        key = tk[j];
        tv = tw[j];
        ++j;
      } else {
        key = ck[i];
        cv = cw[i];
        tv = tw[j];
        ++i;
        ++j;
      }
      keys.push_back(key);
      w.push_back(tau * cv + (1.0 - tau) * tv);
    }
    tgt.replace_active_set(std::move(keys), std::move(w));
  }

  AgentConfig cfg_;
  EnvSpec env_;
  Mlp critic1_, critic2_, actor_;
  Mlp target_critic1_, target_critic2_, target_actor_;
  AdamState critic1_opt_, critic2_opt_, actor_opt_;
  std::vector<std::size_t> critic_budgets_, actor_budgets_;
  long updates_ = 0;

  // Reused buffers for the training hot path.
  Batch batch_;
  std::vector<double> y_;
  Matrix next_actions_, sa_next_, sa_, sa_pi_, dq_, dsa_, dactor_out_;
  Workspace ws_target_actor_, ws_target_c1_, ws_target_c2_;
  Workspace ws_c1_, ws_c2_, ws_actor_, ws_c1_pi_;
  mutable Workspace ws_act1_;
  Gradients critic_grads_, actor_grads_;
};

}  // namespace sparserl

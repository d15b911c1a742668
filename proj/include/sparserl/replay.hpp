// Uniform experience replay. A circular buffer sized to hold the agent's
// entire history by default; sampling is uniform with replacement.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sparserl/math.hpp"
#include "sparserl/rng.hpp"

namespace sparserl {

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  double done = 0.0;  // 1.0 only for true environment termination
};

// Column-major training batch: each matrix is (dims x n).
struct Batch {
  Matrix states, actions, next_states;
  std::vector<double> rewards, done;

  int size() const { return states.cols; }
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0)
      throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    data_.reserve(capacity);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return data_.size(); }

  void store(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  const Transition& at(std::size_t i) const { return data_[i]; }

  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const {
    if (data_.empty())
      throw std::logic_error("ReplayBuffer: cannot sample from an empty buffer");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
      idx[i] = static_cast<std::size_t>(rng.uniform_int(data_.size()));
    return idx;
  }

  std::vector<Transition> sample_batch(std::size_t n, Rng& rng) const {
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i : sample_indices(n, rng)) out.push_back(data_[i]);
    return out;
  }

  // Assembles a batch directly into matrix form (same index draws as
  // sample_batch).
  void sample_into(std::size_t n, Rng& rng, Batch& batch) const {
    const std::vector<std::size_t> idx = sample_indices(n, rng);
    const int state_dim = static_cast<int>(data_[0].state.size());
    const int action_dim = static_cast<int>(data_[0].action.size());
    const int cols = static_cast<int>(n);
    batch.states.resize(state_dim, cols);
    batch.actions.resize(action_dim, cols);
    batch.next_states.resize(state_dim, cols);
    batch.rewards.resize(n);
    batch.done.resize(n);
    for (int c = 0; c < cols; ++c) {
      const Transition& t = data_[idx[c]];
      for (int r = 0; r < state_dim; ++r) {
        batch.states.at(r, c) = t.state[r];
        batch.next_states.at(r, c) = t.next_state[r];
      }
      for (int r = 0; r < action_dim; ++r) batch.actions.at(r, c) = t.action[r];
      batch.rewards[c] = t.reward;
      batch.done[c] = t.done;
    }
  }

 private:
  std::size_t capacity_;
  std::vector<Transition> data_;
  std::size_t cursor_ = 0;
};

}  // namespace sparserl

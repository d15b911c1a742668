// Topology evolution: magnitude-based removal paired with random
// zero-initialized growth (connection count preserved), plus budget pruning
// for target networks. Removal order is by (|w|, key) so ties resolve in
// stable coordinate order.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sparserl/adam.hpp"
#include "sparserl/net.hpp"
#include "sparserl/rng.hpp"

namespace sparserl {

struct LayerDelta {
  std::vector<std::uint64_t> removed;
  std::vector<std::uint64_t> added;
  std::size_t shortfall = 0;
};

struct EvolutionDelta {
  std::vector<LayerDelta> layers;

  std::size_t moves() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.removed.size();
    return n;
  }
  bool empty() const { return moves() == 0; }
};

namespace detail {

// Indices of the `take` smallest entries by (|w|, key).
inline std::vector<std::size_t> smallest_by_magnitude(
    const std::vector<double>& w, const std::vector<std::uint64_t>& keys,
    std::size_t take) {
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::fabs(w[a]);
    const double mb = std::fabs(w[b]);
    if (ma != mb) return ma < mb;
    return keys[a] < keys[b];
  });
  order.resize(take);
  return order;
}

}  // namespace detail

// One SET step on a single layer: removes the floor(eta * count) active
// connections closest to zero, then grows the same number of fresh
// connections at uniformly random inactive positions with zero weights and
// zero Adam moments. Should growth space ever run short, grows as much as
// possible and reports the shortfall.
inline LayerDelta evolve_layer(SparseLayer& layer, LayerMoments& moments,
                               double eta, Rng& rng) {
  if (eta < 0.0 || eta >= 1.0)
    throw std::invalid_argument("evolve_layer: eta must be in [0, 1)");
  LayerDelta delta;
  const std::size_t count = layer.mask().count();
  const std::size_t k = static_cast<std::size_t>(
      std::floor(eta * static_cast<double>(count)));
  if (k == 0) return delta;

  const auto& keys = layer.mask().keys();
  const auto& w = layer.weights();
  std::vector<std::size_t> removed_idx =
      detail::smallest_by_magnitude(w, keys, k);
  std::vector<char> removed_flag(count, 0);
  delta.removed.reserve(k);
  for (std::size_t idx : removed_idx) {
    removed_flag[idx] = 1;
    delta.removed.push_back(keys[idx]);
  }
  std::sort(delta.removed.begin(), delta.removed.end());

  std::vector<std::uint64_t> kept_keys;
  std::vector<double> kept_w, kept_m, kept_v;
  kept_keys.reserve(count - k);
  kept_w.reserve(count - k);
  kept_m.reserve(count - k);
  kept_v.reserve(count - k);
  for (std::size_t i = 0; i < count; ++i) {
    if (removed_flag[i]) continue;
    kept_keys.push_back(keys[i]);
    kept_w.push_back(w[i]);
    kept_m.push_back(moments.m_w[i]);
    kept_v.push_back(moments.v_w[i]);
  }

  // Growth pool: every position inactive after removal (freed slots included).
  const std::uint64_t total = layer.mask().total();
  std::vector<std::uint64_t> pool;
  pool.reserve(total - kept_keys.size());
  std::size_t cursor = 0;
  for (std::uint64_t key = 0; key < total; ++key) {
    if (cursor < kept_keys.size() && kept_keys[cursor] == key) {
      ++cursor;
      continue;
    }
    pool.push_back(key);
  }
  const std::size_t grow = std::min(k, pool.size());
  delta.shortfall = k - grow;
  for (std::size_t i = 0; i < grow; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(grow);
  std::sort(pool.begin(), pool.end());
  delta.added = pool;

  // Merge survivors with the grown keys (both sorted, disjoint).
  std::vector<std::uint64_t> new_keys;
  std::vector<double> new_w, new_m, new_v;
  const std::size_t new_count = kept_keys.size() + grow;
  new_keys.reserve(new_count);
  new_w.reserve(new_count);
  new_m.reserve(new_count);
  new_v.reserve(new_count);
  std::size_t a = 0, b = 0;
  while (a < kept_keys.size() || b < pool.size()) {
    if (b >= pool.size() || (a < kept_keys.size() && kept_keys[a] < pool[b])) {
      new_keys.push_back(kept_keys[a]);
      new_w.push_back(kept_w[a]);
      new_m.push_back(kept_m[a]);
      new_v.push_back(kept_v[a]);
      ++a;
    } else {
      new_keys.push_back(pool[b]);
      new_w.push_back(0.0);
      new_m.push_back(0.0);
      new_v.push_back(0.0);
      ++b;
    }
  }
  layer.replace_active_set(std::move(new_keys), std::move(new_w));
  moments.m_w = std::move(new_m);
  moments.v_w = std::move(new_v);
  return delta;
}

// Deactivates the smallest-|w| connections until the layer holds at most
// `budget` connections. Used to keep target networks at their initial size.
inline void prune_to_budget(SparseLayer& layer, std::size_t budget) {
  const std::size_t count = layer.mask().count();
  if (count <= budget) return;
  const std::size_t remove = count - budget;
  const auto& keys = layer.mask().keys();
  const auto& w = layer.weights();
  std::vector<std::size_t> removed_idx =
      detail::smallest_by_magnitude(w, keys, remove);
  std::vector<char> removed_flag(count, 0);
  for (std::size_t idx : removed_idx) removed_flag[idx] = 1;
  std::vector<std::uint64_t> kept_keys;
  std::vector<double> kept_w;
  kept_keys.reserve(budget);
  kept_w.reserve(budget);
  for (std::size_t i = 0; i < count; ++i) {
    if (removed_flag[i]) continue;
    kept_keys.push_back(keys[i]);
    kept_w.push_back(w[i]);
  }
  layer.replace_active_set(std::move(kept_keys), std::move(kept_w));
}

// Active connections across all layers, dense output layer included,
// biases excluded.
inline std::size_t connection_count(const Mlp& net) {
  std::size_t total = 0;
  for (std::size_t l = 0; l < net.layer_count(); ++l)
    total += net.layer(l).mask().count();
  return total;
}

}  // namespace sparserl

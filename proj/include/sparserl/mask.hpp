// Binary connectivity mask for one layer, stored as a sorted list of flat
// row-major indices (key = in_index * n_out + out_index). Sorted order doubles
// as the stable tie-break order everywhere a deterministic ordering is needed.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sparserl/rng.hpp"

namespace sparserl {

class Mask {
 public:
  Mask() = default;

  Mask(int n_in, int n_out, std::vector<std::uint64_t> keys)
      : n_in_(n_in), n_out_(n_out), keys_(std::move(keys)) {
    if (n_in < 1 || n_out < 1)
      throw std::invalid_argument("Mask: dimensions must be positive");
    const std::uint64_t total = this->total();
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (keys_[i] >= total) throw std::invalid_argument("Mask: key out of range");
      if (i > 0 && keys_[i] <= keys_[i - 1])
        throw std::invalid_argument("Mask: keys must be sorted and unique");
    }
  }

  static Mask dense(int n_in, int n_out) {
    std::vector<std::uint64_t> keys(static_cast<std::size_t>(n_in) * n_out);
    std::iota(keys.begin(), keys.end(), std::uint64_t{0});
    return Mask(n_in, n_out, std::move(keys));
  }

  int n_in() const { return n_in_; }
  int n_out() const { return n_out_; }
  std::uint64_t total() const {
    return static_cast<std::uint64_t>(n_in_) * static_cast<std::uint64_t>(n_out_);
  }

  // ‖M‖₀
  std::size_t count() const { return keys_.size(); }

  const std::vector<std::uint64_t>& keys() const { return keys_; }

  bool contains(std::uint64_t key) const {
    return std::binary_search(keys_.begin(), keys_.end(), key);
  }

  std::uint64_t key_of(int in_index, int out_index) const {
    return static_cast<std::uint64_t>(in_index) * n_out_ + out_index;
  }
  int in_of(std::uint64_t key) const { return static_cast<int>(key / n_out_); }
  int out_of(std::uint64_t key) const { return static_cast<int>(key % n_out_); }

 private:
  int n_in_ = 0;
  int n_out_ = 0;
  std::vector<std::uint64_t> keys_;
};

// Erdos-Renyi sparse initialization: exactly
// min(round(lambda * (n_in + n_out)), n_in * n_out) connections, drawn
// uniformly without replacement. Clamps to a fully dense mask (consuming no
// randomness) when the target meets or exceeds the layer capacity.
inline Mask er_mask_init(int n_in, int n_out, double lambda, Rng& rng) {
  if (n_in < 1 || n_out < 1)
    throw std::invalid_argument("er_mask_init: dimensions must be positive");
  if (lambda < 0.0)
    throw std::invalid_argument("er_mask_init: lambda must be non-negative");
  const std::uint64_t total =
      static_cast<std::uint64_t>(n_in) * static_cast<std::uint64_t>(n_out);
  const double expected = lambda * (static_cast<double>(n_in) + n_out);
  std::uint64_t want = static_cast<std::uint64_t>(std::llround(expected));
  if (want >= total) return Mask::dense(n_in, n_out);

  std::vector<std::uint64_t> pool(total);
  std::iota(pool.begin(), pool.end(), std::uint64_t{0});
  for (std::uint64_t i = 0; i < want; ++i) {
    std::uint64_t j = i + rng.uniform_int(total - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(want);
  std::sort(pool.begin(), pool.end());
  return Mask(n_in, n_out, std::move(pool));
}

}  // namespace sparserl

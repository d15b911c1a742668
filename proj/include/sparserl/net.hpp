// Truly sparse multilayer perceptron: weights exist only for active mask
// positions, and forward/backward touch active positions only. Activations
// are processed as (neurons x batch) matrices so the batch dimension stays
// contiguous in the hot loops.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sparserl/mask.hpp"
#include "sparserl/math.hpp"
#include "sparserl/rng.hpp"

namespace sparserl {

enum class Activation { kRelu, kTanhScaled, kLinear };

class SparseLayer {
 public:
  SparseLayer(Mask mask, Activation act)
      : mask_(std::move(mask)),
        act_(act),
        weights_(mask_.count(), 0.0),
        bias_(mask_.n_out(), 0.0) {
    rebuild_coords();
  }

  int n_in() const { return mask_.n_in(); }
  int n_out() const { return mask_.n_out(); }
  Activation activation() const { return act_; }
  const Mask& mask() const { return mask_; }

  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  std::vector<double>& bias() { return bias_; }

  const std::vector<std::uint32_t>& in_indices() const { return rows_; }
  const std::vector<std::uint32_t>& out_indices() const { return cols_; }

  // Swaps in a new active set; weights must align with keys. Bias untouched.
  void replace_active_set(std::vector<std::uint64_t> keys,
                          std::vector<double> weights) {
    if (keys.size() != weights.size())
      throw std::invalid_argument("replace_active_set: size mismatch");
    mask_ = Mask(mask_.n_in(), mask_.n_out(), std::move(keys));
    weights_ = std::move(weights);
    rebuild_coords();
  }

  // pre = W^T in + b over active connections; pre is (n_out x batch).
  void affine_batch(const Matrix& in, Matrix& pre) const {
    const int batch = in.cols;
    pre.resize(mask_.n_out(), batch);
    for (int k = 0; k < mask_.n_out(); ++k) {
      double* row = pre.row(k);
      const double b = bias_[k];
      for (int n = 0; n < batch; ++n) row[n] = b;
    }
    const std::size_t m = weights_.size();
    for (std::size_t p = 0; p < m; ++p)
      axpy_n(weights_[p], in.row(rows_[p]), pre.row(cols_[p]), batch);
  }

  // The dense matrix this layer is equivalent to (masked positions are 0).
  Matrix effective_dense() const {
    Matrix w(mask_.n_in(), mask_.n_out());
    for (std::size_t p = 0; p < weights_.size(); ++p)
      w.at(static_cast<int>(rows_[p]), static_cast<int>(cols_[p])) = weights_[p];
    return w;
  }

 private:
  void rebuild_coords() {
    const auto& keys = mask_.keys();
    rows_.resize(keys.size());
    cols_.resize(keys.size());
    for (std::size_t p = 0; p < keys.size(); ++p) {
      rows_[p] = static_cast<std::uint32_t>(mask_.in_of(keys[p]));
      cols_[p] = static_cast<std::uint32_t>(mask_.out_of(keys[p]));
    }
    if (weights_.size() != keys.size()) weights_.resize(keys.size(), 0.0);
  }

  Mask mask_;
  Activation act_;
  std::vector<std::uint32_t> rows_, cols_;  // decoded mask keys
  std::vector<double> weights_;             // aligned with mask keys
  std::vector<double> bias_;
};

struct LayerGrads {
  std::vector<double> w;  // aligned with the layer's mask keys
  std::vector<double> bias;
};

struct Gradients {
  std::vector<LayerGrads> layers;
};

// Per-net scratch: forward cache (inputs, pre-activations, activations) plus
// backward buffers. A workspace is only valid for the net/version that last
// filled it.
struct Workspace {
  Matrix input;
  std::vector<Matrix> pre, act;
  std::vector<Matrix> dpre;
  Matrix din;
  const void* net = nullptr;
  std::uint64_t net_version = ~std::uint64_t{0};
  int batch = -1;
};

inline void apply_activation(Activation act, double scale, const Matrix& pre,
                             Matrix& out) {
  out.resize(pre.rows, pre.cols);
  const std::size_t n = pre.data.size();
  switch (act) {
    case Activation::kRelu:
      for (std::size_t i = 0; i < n; ++i) {
        const double z = pre.data[i];
        out.data[i] = z > 0.0 ? z : 0.0;
      }
      break;
    case Activation::kTanhScaled:
      for (std::size_t i = 0; i < n; ++i)
        out.data[i] = scale * std::tanh(pre.data[i]);
      break;
    case Activation::kLinear:
      out.data = pre.data;
      break;
  }
}

// dpre = dact ⊙ act'(pre), using the cached activation where convenient.
inline void activation_backward(Activation act, double scale, const Matrix& pre,
                                const Matrix& activated, const Matrix& dact,
                                Matrix& dpre) {
  dpre.resize(pre.rows, pre.cols);
  const std::size_t n = pre.data.size();
  switch (act) {
    case Activation::kRelu:
      for (std::size_t i = 0; i < n; ++i)
        dpre.data[i] = pre.data[i] > 0.0 ? dact.data[i] : 0.0;
      break;
    case Activation::kTanhScaled:
      for (std::size_t i = 0; i < n; ++i) {
        const double t = activated.data[i] / scale;
        dpre.data[i] = dact.data[i] * scale * (1.0 - t * t);
      }
      break;
    case Activation::kLinear:
      dpre.data = dact.data;
      break;
  }
}

class Mlp {
 public:
  Mlp() = default;

  Mlp(int input_dim, std::vector<SparseLayer> layers, double output_scale)
      : input_dim_(input_dim),
        output_scale_(output_scale),
        layers_(std::move(layers)) {
    int prev = input_dim_;
    for (const auto& l : layers_) {
      if (l.n_in() != prev)
        throw std::invalid_argument("Mlp: layer dimensions do not chain");
      prev = l.n_out();
    }
    if (!layers_.empty() &&
        layers_.back().activation() == Activation::kTanhScaled &&
        output_scale_ <= 0.0)
      throw std::invalid_argument("Mlp: tanh output requires positive scale");
  }

  int input_dim() const { return input_dim_; }
  int output_dim() const { return layers_.empty() ? 0 : layers_.back().n_out(); }
  double output_scale() const { return output_scale_; }
  std::size_t layer_count() const { return layers_.size(); }

  const SparseLayer& layer(std::size_t i) const { return layers_[i]; }
  // Mutable access implies the caller is about to change the net.
  SparseLayer& mutable_layer(std::size_t i) {
    ++version_;
    return layers_[i];
  }

  std::uint64_t version() const { return version_; }
  void bump_version() { ++version_; }

  void forward(const Matrix& input, Workspace& ws) const {
    if (input.rows != input_dim_)
      throw std::invalid_argument("Mlp::forward: input dimension mismatch");
    const std::size_t depth = layers_.size();
    ws.pre.resize(depth);
    ws.act.resize(depth);
    ws.dpre.resize(depth);
    ws.input = input;
    const Matrix* cur = &ws.input;
    for (std::size_t l = 0; l < depth; ++l) {
      layers_[l].affine_batch(*cur, ws.pre[l]);
      apply_activation(layers_[l].activation(), output_scale_, ws.pre[l],
                       ws.act[l]);
      cur = &ws.act[l];
    }
    ws.net = this;
    ws.net_version = version_;
    ws.batch = input.cols;
  }

  const Matrix& output(const Workspace& ws) const { return ws.act.back(); }

  std::vector<double> forward1(const std::vector<double>& in) const {
    Matrix m(input_dim_, 1);
    if (static_cast<int>(in.size()) != input_dim_)
      throw std::invalid_argument("Mlp::forward1: input dimension mismatch");
    for (int i = 0; i < input_dim_; ++i) m.at(i, 0) = in[i];
    Workspace ws;
    forward(m, ws);
    const Matrix& out = output(ws);
    std::vector<double> res(out.rows);
    for (int i = 0; i < out.rows; ++i) res[i] = out.at(i, 0);
    return res;
  }

  // dout is (output_dim x batch), the loss gradient w.r.t. the net output
  // (any 1/N batch factors already folded in). Fills `grads` (if non-null)
  // with per-active-connection and bias gradients accumulated over the batch,
  // and `dinput` (if non-null) with the gradient w.r.t. the input matrix.
  void backward(Workspace& ws, const Matrix& dout, Gradients* grads,
                Matrix* dinput) const {
    if (ws.net != this || ws.net_version != version_)
      throw std::logic_error("Mlp::backward: stale or mismatched forward cache");
    if (dout.rows != output_dim() || dout.cols != ws.batch)
      throw std::invalid_argument("Mlp::backward: gradient shape mismatch");
    const int depth = static_cast<int>(layers_.size());
    const int batch = ws.batch;
    if (grads) {
      grads->layers.resize(depth);
      for (int l = 0; l < depth; ++l) {
        grads->layers[l].w.assign(layers_[l].weights().size(), 0.0);
        grads->layers[l].bias.assign(layers_[l].n_out(), 0.0);
      }
    }
    activation_backward(layers_[depth - 1].activation(), output_scale_,
                        ws.pre[depth - 1], ws.act[depth - 1], dout,
                        ws.dpre[depth - 1]);
    for (int l = depth - 1; l >= 0; --l) {
      const SparseLayer& layer = layers_[l];
      const Matrix& dpre = ws.dpre[l];
      const Matrix& in_act = (l == 0) ? ws.input : ws.act[l - 1];
      if (grads) {
        LayerGrads& g = grads->layers[l];
        for (int k = 0; k < layer.n_out(); ++k)
          g.bias[k] = sum_n(dpre.row(k), batch);
        const auto& rows = layer.in_indices();
        const auto& cols = layer.out_indices();
        const std::size_t m = layer.weights().size();
        for (std::size_t p = 0; p < m; ++p)
          g.w[p] = dot_n(dpre.row(cols[p]), in_act.row(rows[p]), batch);
      }
      const bool need_din = l > 0 || dinput != nullptr;
      if (!need_din) continue;
      ws.din.resize(layer.n_in(), batch);
      ws.din.zero();
      {
        const auto& rows = layer.in_indices();
        const auto& cols = layer.out_indices();
        const auto& w = layer.weights();
        for (std::size_t p = 0; p < w.size(); ++p)
          axpy_n(w[p], dpre.row(cols[p]), ws.din.row(rows[p]), batch);
      }
      if (l > 0) {
        activation_backward(layers_[l - 1].activation(), output_scale_,
                            ws.pre[l - 1], ws.act[l - 1], ws.din,
                            ws.dpre[l - 1]);
      } else if (dinput) {
        *dinput = ws.din;
      }
    }
  }

 private:
  int input_dim_ = 0;
  double output_scale_ = 0.0;
  std::vector<SparseLayer> layers_;
  std::uint64_t version_ = 0;
};

// Uniform fan-in init for active weights and biases: U(-1/sqrt(n_in), +1/sqrt(n_in)).
// Draw order is fixed: weights in mask key order, then biases.
inline void init_weights(SparseLayer& layer, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(layer.n_in()));
  for (auto& w : layer.weights()) w = rng.uniform(-bound, bound);
  for (auto& b : layer.bias()) b = rng.uniform(-bound, bound);
}

// Actor: state -> hidden -> hidden -> action, ReLU hidden, Tanh-scaled output.
// The first two layers are ER-sparse (or fully dense when `dense` is set);
// the output layer is always dense.
inline Mlp make_actor(int state_dim, int action_dim, int hidden,
                      double max_action, bool dense, double lambda1,
                      double lambda2, Rng& rng) {
  std::vector<SparseLayer> layers;
  layers.emplace_back(dense ? Mask::dense(state_dim, hidden)
                            : er_mask_init(state_dim, hidden, lambda1, rng),
                      Activation::kRelu);
  layers.emplace_back(dense ? Mask::dense(hidden, hidden)
                            : er_mask_init(hidden, hidden, lambda2, rng),
                      Activation::kRelu);
  layers.emplace_back(Mask::dense(hidden, action_dim), Activation::kTanhScaled);
  Mlp net(state_dim, std::move(layers), max_action);
  for (std::size_t l = 0; l < net.layer_count(); ++l)
    init_weights(net.mutable_layer(l), rng);
  return net;
}

// Critic: (state, action) -> hidden -> hidden -> scalar, linear output.
inline Mlp make_critic(int state_dim, int action_dim, int hidden, bool dense,
                       double lambda1, double lambda2, Rng& rng) {
  const int in_dim = state_dim + action_dim;
  std::vector<SparseLayer> layers;
  layers.emplace_back(dense ? Mask::dense(in_dim, hidden)
                            : er_mask_init(in_dim, hidden, lambda1, rng),
                      Activation::kRelu);
  layers.emplace_back(dense ? Mask::dense(hidden, hidden)
                            : er_mask_init(hidden, hidden, lambda2, rng),
                      Activation::kRelu);
  layers.emplace_back(Mask::dense(hidden, 1), Activation::kLinear);
  Mlp net(state_dim + action_dim, std::move(layers), 0.0);
  for (std::size_t l = 0; l < net.layer_count(); ++l)
    init_weights(net.mutable_layer(l), rng);
  return net;
}

}  // namespace sparserl

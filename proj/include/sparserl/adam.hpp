// Adam restricted to active connections. Moment accumulators mirror the
// active set of each layer exactly; weight decay is the coupled form (added
// to the gradient before the moment updates) and applies to weights only.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sparserl/net.hpp"

namespace sparserl {

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

struct LayerMoments {
  std::vector<double> m_w, v_w;
  std::vector<double> m_b, v_b;
};

struct AdamState {
  std::vector<LayerMoments> layers;
  long step = 0;

  static AdamState like(const Mlp& net) {
    AdamState st;
    st.layers.resize(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      const SparseLayer& layer = net.layer(l);
      st.layers[l].m_w.assign(layer.weights().size(), 0.0);
      st.layers[l].v_w.assign(layer.weights().size(), 0.0);
      st.layers[l].m_b.assign(layer.bias().size(), 0.0);
      st.layers[l].v_b.assign(layer.bias().size(), 0.0);
    }
    return st;
  }
};

inline void adam_step(Mlp& net, AdamState& st, const Gradients& grads,
                      double lr, double weight_decay) {
  if (st.layers.size() != net.layer_count() ||
      grads.layers.size() != net.layer_count())
    throw std::invalid_argument("adam_step: state/gradient layer mismatch");
  st.step += 1;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(st.step));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    SparseLayer& layer = net.mutable_layer(l);
    LayerMoments& mo = st.layers[l];
    const LayerGrads& g = grads.layers[l];
    if (mo.m_w.size() != layer.weights().size() ||
        g.w.size() != layer.weights().size())
      throw std::invalid_argument("adam_step: active set mismatch");
    auto& w = layer.weights();
    for (std::size_t p = 0; p < w.size(); ++p) {
      const double grad = g.w[p] + weight_decay * w[p];
      mo.m_w[p] = kAdamBeta1 * mo.m_w[p] + (1.0 - kAdamBeta1) * grad;
      mo.v_w[p] = kAdamBeta2 * mo.v_w[p] + (1.0 - kAdamBeta2) * grad * grad;
      const double mhat = mo.m_w[p] / bc1;
      const double vhat = mo.v_w[p] / bc2;
      w[p] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
    }
    auto& b = layer.bias();
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double grad = g.bias[k];
      mo.m_b[k] = kAdamBeta1 * mo.m_b[k] + (1.0 - kAdamBeta1) * grad;
      mo.v_b[k] = kAdamBeta2 * mo.v_b[k] + (1.0 - kAdamBeta2) * grad * grad;
      const double mhat = mo.m_b[k] / bc1;
      const double vhat = mo.v_b[k] / bc2;
      b[k] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
    }
  }
}

}  // namespace sparserl

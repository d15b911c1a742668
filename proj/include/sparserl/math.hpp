// Small dense-matrix container and the scalar kernels every numeric path
// shares. The kernels fix their accumulation order so that two builds (or a
// reference reimplementation calling the same helpers) produce bit-identical
// results.
#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace sparserl {

// Row-major matrix of doubles. Convention throughout the library:
// rows = neurons, cols = samples, so one neuron's batch values are contiguous.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) { resize(r, c); }

  void resize(int r, int c) {
    rows = r;
    cols = c;
    data.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0);
  }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }

  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const {
    return data.data() + static_cast<std::size_t>(r) * cols;
  }

  double& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
};

// y += a * x, elementwise. No reductions, so auto-vectorization keeps the
// per-element result exact.
inline void axpy_n(double a, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

// Dot product with eight independent accumulators and a fixed combine order.
inline double dot_n(const double* x, const double* y, int n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0, a7 = 0;
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 += x[i] * y[i];
    a1 += x[i + 1] * y[i + 1];
    a2 += x[i + 2] * y[i + 2];
    a3 += x[i + 3] * y[i + 3];
    a4 += x[i + 4] * y[i + 4];
    a5 += x[i + 5] * y[i + 5];
    a6 += x[i + 6] * y[i + 6];
    a7 += x[i + 7] * y[i + 7];
  }
  double s = ((a0 + a1) + (a2 + a3)) + ((a4 + a5) + (a6 + a7));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

// Sum with the same accumulator scheme as dot_n.
inline double sum_n(const double* x, int n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0, a7 = 0;
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 += x[i];
    a1 += x[i + 1];
    a2 += x[i + 2];
    a3 += x[i + 3];
    a4 += x[i + 4];
    a5 += x[i + 5];
    a6 += x[i + 6];
    a7 += x[i + 7];
  }
  double s = ((a0 + a1) + (a2 + a3)) + ((a4 + a5) + (a6 + a7));
  for (; i < n; ++i) s += x[i];
  return s;
}

inline double clip(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace sparserl

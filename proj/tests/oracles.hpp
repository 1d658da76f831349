// Test-side oracles. These deliberately take different computational routes
// than the library: singular values via a two-sided Jacobi eigensolve of the
// Gram matrix, gradients via central finite differences.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "kgae/dbn.hpp"
#include "kgae/matrix.hpp"
#include "kgae/rng.hpp"

namespace oracles {

inline std::vector<double> gram_singular_values(const kgae::MatD& a) {
  const std::size_t n = a.cols();
  kgae::MatD g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
      g(i, j) = s;
    }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += g(p, q) * g(p, q);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (g(p, q) == 0.0) continue;
        const double theta = 0.5 * std::atan2(2.0 * g(p, q), g(q, q) - g(p, p));
        const double c = std::cos(theta), s = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          const double gkp = g(k, p), gkq = g(k, q);
          g(k, p) = c * gkp - s * gkq;
          g(k, q) = s * gkp + c * gkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double gpk = g(p, k), gqk = g(q, k);
          g(p, k) = c * gpk - s * gqk;
          g(q, k) = s * gpk + c * gqk;
        }
      }
  }
  std::vector<double> sv(n);
  for (std::size_t i = 0; i < n; ++i) sv[i] = std::sqrt(std::max(g(i, i), 0.0));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

inline double frob_diff(const kgae::MatD& a, const kgae::MatD& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double loss_of(const kgae::DenseNetwork& net, const kgae::Dataset& x,
                      const kgae::Dataset& t) {
  return kgae::mse(kgae::forward(net, x).back(), t);
}

// Fresh networks keep biases at zero, which parks every pre-activation of a
// relu-dead sample exactly on the selu kink where a finite difference
// straddles two one-sided slopes. Gradient checks want a generic parameter
// point, so give the biases some spread first.
inline void randomize_biases(kgae::DenseNetwork& net, kgae::SplitMix64& gen) {
  for (auto& layer : net.layers)
    for (double& b : layer.bias) b = gen.next_double() - 0.5;
}

// Worst relative deviation of backprop from central finite differences over
// every parameter of the network.
inline double max_grad_rel_err(kgae::DenseNetwork net, const kgae::Dataset& x,
                               const kgae::Dataset& t) {
  const auto grads = kgae::backprop(net, x, t);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    const std::size_t weight_count = layer.weights.data().size();
    for (std::size_t i = 0; i < weight_count + layer.bias.size(); ++i) {
      double* p = i < weight_count ? &layer.weights.data()[i] : &layer.bias[i - weight_count];
      const double g =
          i < weight_count ? grads.weights[l].data()[i] : grads.bias[l][i - weight_count];
      const double saved = *p;
      *p = saved + h;
      const double up = loss_of(net, x, t);
      *p = saved - h;
      const double down = loss_of(net, x, t);
      *p = saved;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace oracles

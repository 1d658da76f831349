#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgae/io.hpp"
#include "kgae/matrix.hpp"

namespace kgae {

// Dominant rank-k singular triplets of a real matrix. Rows of the left
// factor, scaled by the singular values, serve as the word vectors.
struct EmbeddingMap {
  std::size_t k = 0;
  MatD left;                    // rows x k, orthonormal columns
  std::vector<double> values;   // k singular values, non-increasing
  MatD right;                   // cols x k, orthonormal columns

  std::vector<double> vector(std::size_t word) const {
    std::vector<double> v(k);
    for (std::size_t j = 0; j < k; ++j) v[j] = left(word, j) * values[j];
    return v;
  }

  // sum_i sigma_i u_i v_i^T, the Frobenius-optimal rank-k approximation.
  MatD reconstruct() const {
    MatD out(left.rows(), right.rows());
    for (std::size_t i = 0; i < left.rows(); ++i)
      for (std::size_t j = 0; j < right.rows(); ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < k; ++t) s += values[t] * left(i, t) * right(j, t);
        out(i, j) = s;
      }
    return out;
  }
};

namespace detail {

struct SvdResult {
  MatD u;                      // m x n
  std::vector<double> sigma;   // n, non-increasing
  MatD v;                      // n x n
};

// One-sided Jacobi (Hestenes): rotate column pairs of a working copy until
// all pairs are orthogonal to 1e-10, then read off sigma as column norms.
// Requires m >= n; the caller transposes when needed.
inline SvdResult one_sided_jacobi(MatD b) {
  const std::size_t m = b.rows(), n = b.cols();
  MatD v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  constexpr double tol = 1e-10;
  constexpr int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          alpha += b(r, p) * b(r, p);
          beta += b(r, q) * b(r, q);
          gamma += b(r, p) * b(r, q);
        }
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < m; ++r) {
          const double bp = b(r, p), bq = b(r, q);
          b(r, p) = c * bp - s * bq;
          b(r, q) = s * bp + c * bq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * vq;
          v(r, q) = s * vp + c * vq;
        }
      }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += b(r, j) * b(r, j);
    sigma[j] = std::sqrt(s);
  }
  // Non-increasing order; stable so equal values keep their column order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t c) { return sigma[a] > sigma[c]; });

  SvdResult out;
  out.u = MatD(m, n);
  out.v = MatD(n, n);
  out.sigma.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    const double inv = sigma[src] > 0.0 ? 1.0 / sigma[src] : 0.0;
    for (std::size_t r = 0; r < m; ++r) out.u(r, j) = b(r, src) * inv;
    for (std::size_t r = 0; r < n; ++r) out.v(r, j) = v(r, src);
  }
  return out;
}

}  // namespace detail

// Dominant k singular triplets of `matrix`; by Eckart-Young their product
// is the best rank-k approximation in Frobenius norm.
inline EmbeddingMap svd_embed(const MatD& matrix, std::size_t k) {
  const std::size_t m = matrix.rows(), n = matrix.cols();
  if (k < 1 || k > std::min(m, n)) throw std::invalid_argument("svd_embed: k out of range");
  if (!all_finite(matrix)) throw std::invalid_argument("svd_embed: non-finite entries");

  const bool transposed = m < n;
  detail::SvdResult full =
      detail::one_sided_jacobi(transposed ? transpose(matrix) : matrix);
  if (transposed) std::swap(full.u, full.v);

  EmbeddingMap map;
  map.k = k;
  map.values.assign(full.sigma.begin(), full.sigma.begin() + static_cast<std::ptrdiff_t>(k));
  map.left = MatD(m, k);
  map.right = MatD(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < m; ++r) map.left(r, j) = full.u(r, j);
    for (std::size_t r = 0; r < n; ++r) map.right(r, j) = full.v(r, j);
  }
  return map;
}

// One row per word: the word, then its k vector components.
inline void write_embedding(std::ostream& out, const EmbeddingMap& map,
                            const std::vector<std::string>& words) {
  if (words.size() != map.left.rows())
    throw std::invalid_argument("write_embedding: word count does not match embedding rows");
  for (std::size_t i = 0; i < words.size(); ++i) {
    out << words[i];
    for (double v : map.vector(i)) out << ' ' << format_double(v);
    out << '\n';
  }
}

}  // namespace kgae

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "kgae/error.hpp"
#include "kgae/matrix.hpp"
#include "kgae/rng.hpp"

namespace kgae {

struct SwReport {
  std::size_t n = 0;
  double w = 0.0;
  bool pooled = false;  // 2-D input was flattened into one sample
};

namespace detail {

// Inverse standard normal CDF. Rational first guess (Beasley-Springer
// flavour, constants from AS 111) refined by two Newton steps on
// Phi(x) = erfc(-x/sqrt(2))/2, which brings it to full double precision.
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("norm_quantile: p outside (0,1)");
  const double q = p - 0.5;
  double x;
  if (std::abs(q) <= 0.42) {
    const double r = q * q;
    x = q * (((-25.44106049637 * r + 41.39119773534) * r - 18.61500062529) * r + 2.50662823884) /
        ((((3.13082909833 * r - 21.06224101826) * r + 23.08336743743) * r - 8.47351093090) * r + 1.0);
  } else {
    double r = q > 0.0 ? 1.0 - p : p;
    r = std::sqrt(-std::log(r));
    x = (((2.32121276858 * r + 4.85014127135) * r - 2.29796479134) * r - 2.78718931138) /
        ((1.63706781897 * r + 3.54388924762) * r + 1.0);
    if (q < 0.0) x = -x;
  }
  constexpr double inv_sqrt2 = 0.70710678118654752;
  constexpr double inv_sqrt2pi = 0.39894228040143268;
  for (int it = 0; it < 2; ++it) {
    const double err = 0.5 * std::erfc(-x * inv_sqrt2) - p;
    const double pdf = inv_sqrt2pi * std::exp(-0.5 * x * x);
    x -= err / pdf;
  }
  return x;
}

inline double poly(std::span<const double> c, double x) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

}  // namespace detail

// Shapiro-Wilk weights for ascending order statistics, by Royston's
// polynomial renormalisation of Blom scores (AS R94, valid 3 <= n <= 5000).
// The returned vector is antisymmetric and has unit Euclidean norm.
inline std::vector<double> sw_coefficients(std::size_t n) {
  if (n < 3 || n > 5000) throw std::invalid_argument("sw_coefficients: n must be in [3, 5000]");
  const std::size_t half = n / 2;
  std::vector<double> upper(half);  // weights paired with the largest order stats
  if (n == 3) {
    upper[0] = std::sqrt(0.5);
  } else {
    static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = detail::norm_quantile((static_cast<double>(i + 1) - 0.375) /
                                   (static_cast<double>(n) + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
    const double a1 = detail::poly(c1, rsn) - m[0] / ssumm2;
    std::size_t start;
    double fac;
    if (n > 5) {
      const double a2 = detail::poly(c2, rsn) - m[1] / ssumm2;
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      upper[0] = a1;
      upper[1] = a2;
      start = 2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
      upper[0] = a1;
      start = 1;
    }
    for (std::size_t i = start; i < half; ++i) upper[i] = -m[i] / fac;
  }
  std::vector<double> a(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    a[n - 1 - i] = upper[i];
    a[i] = -upper[i];
  }
  return a;
}

// W = (sum a_i x_(i))^2 / sum (x_i - mean)^2. Values near 1 mean ordering
// the sample adds essentially no variability.
inline SwReport shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) throw std::invalid_argument("shapiro_wilk: n must be in [3, 5000]");
  std::vector<double> xs(sample.begin(), sample.end());
  for (double v : xs)
    if (!std::isfinite(v)) throw std::invalid_argument("shapiro_wilk: non-finite sample value");
  std::sort(xs.begin(), xs.end());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ssx = 0.0;
  for (double v : xs) ssx += (v - mean) * (v - mean);
  if (ssx == 0.0) throw degenerate_data_error("shapiro_wilk: zero variance (constant sample)");
  const std::vector<double> a = sw_coefficients(n);
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) num += a[i] * (xs[i] - mean);
  return {n, num * num / ssx, false};
}

// One W for a whole rows x cols data set: all entries pooled row-major
// into a single sample.
inline SwReport sw_pooled(const Dataset& data) {
  if (data.size() < 3) throw std::invalid_argument("sw_pooled: need at least 3 values");
  SwReport r = shapiro_wilk(data.data());
  r.pooled = true;
  return r;
}

// Per-column W, for callers that want the unpooled view.
inline std::vector<SwReport> sw_columns(const Dataset& data) {
  std::vector<SwReport> out;
  out.reserve(data.cols());
  for (std::size_t c = 0; c < data.cols(); ++c) {
    std::vector<double> col(data.rows());
    for (std::size_t r = 0; r < data.rows(); ++r) col[r] = data(r, c);
    out.push_back(shapiro_wilk(col));
  }
  return out;
}

// Row-major uniform [0,1) fill from a fresh splitmix64 stream.
inline Dataset gen_uniform(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("gen_uniform: rows and cols must be >= 1");
  Dataset out(rows, cols);
  SplitMix64 gen(seed);
  for (double& v : out.data()) v = gen.next_double();
  return out;
}

}  // namespace kgae

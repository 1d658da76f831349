#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgae/error.hpp"
#include "kgae/io.hpp"
#include "kgae/matrix.hpp"
#include "kgae/rng.hpp"

namespace kgae {

enum class Activation { none, rectifier, scaled_exponential };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::none: return "none";
    case Activation::rectifier: return "relu";
    case Activation::scaled_exponential: return "selu";
  }
  return "?";
}

inline Activation activation_from_string(std::string_view s) {
  if (s == "none") return Activation::none;
  if (s == "relu") return Activation::rectifier;
  if (s == "selu") return Activation::scaled_exponential;
  throw io_error("unknown activation tag: " + std::string(s));
}

// Self-normalizing constants (Klambauer et al. 2017).
inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

inline double selu(double x) {
  return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x);
}

namespace detail {

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::none: return x;
    case Activation::rectifier: return relu(x);
    case Activation::scaled_exponential: return selu(x);
  }
  return x;
}

inline double activate_grad(Activation a, double x) {
  switch (a) {
    case Activation::none: return 1.0;
    case Activation::rectifier: return x > 0.0 ? 1.0 : 0.0;
    case Activation::scaled_exponential:
      return x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
  }
  return 1.0;
}

}  // namespace detail

// Layer widths of the belief-network autoencoder for M properties.
// Hidden widths interleave sibling_k = 2^(k-1) * M^k with
// binary_k = 2^k * M^k for k = 1..M; input and output are both M wide.
// The first hidden layer is rectified, everything after it (including the
// output) is scaled-exponential.
struct DbnTopology {
  std::size_t m = 0;
  std::vector<std::size_t> widths;        // 2M + 2 entries
  std::vector<Activation> activations;    // aligned with widths; [0] is none
  std::vector<std::pair<int, int>> rbm_spans;

  std::size_t parameter_count() const {
    std::size_t count = 0;
    for (std::size_t l = 1; l < widths.size(); ++l) count += widths[l - 1] * widths[l] + widths[l];
    return count;
  }
};

// Consecutive overlapping machine spans (1,3), (3,5), ... over the layer
// stack; the output layer sits after the last span.
inline std::vector<std::pair<int, int>> rbm_spans(std::size_t m) {
  if (m < 1) throw std::invalid_argument("rbm_spans: M must be >= 1");
  std::vector<std::pair<int, int>> spans;
  spans.reserve(m);
  for (std::size_t k = 0; k < m; ++k)
    spans.emplace_back(static_cast<int>(2 * k + 1), static_cast<int>(2 * k + 3));
  return spans;
}

inline DbnTopology topology(std::size_t m) {
  if (m < 1) throw std::invalid_argument("topology: M must be >= 1");
  DbnTopology t;
  t.m = m;
  t.widths.push_back(m);
  t.activations.push_back(Activation::none);
  std::size_t sibling = 1, binary = 2, mk = m;  // 2^(k-1), 2^k, M^k at k=1
  for (std::size_t k = 1; k <= m; ++k) {
    t.widths.push_back(sibling * mk);
    t.activations.push_back(k == 1 ? Activation::rectifier : Activation::scaled_exponential);
    t.widths.push_back(binary * mk);
    t.activations.push_back(Activation::scaled_exponential);
    sibling *= 2;
    binary *= 2;
    mk *= m;
  }
  t.widths.push_back(m);
  t.activations.push_back(Activation::scaled_exponential);
  t.rbm_spans = rbm_spans(m);
  return t;
}

struct DenseLayer {
  MatD weights;                // in-width x out-width
  std::vector<double> bias;    // out-width
  Activation activation = Activation::none;
};

struct DenseNetwork {
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::vector<DenseLayer> layers;

  std::size_t input_width() const { return layers.front().weights.rows(); }
  std::size_t output_width() const { return layers.back().weights.cols(); }

  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w{input_width()};
    for (const auto& l : layers) w.push_back(l.weights.cols());
    return w;
  }
};

// Fan-balanced uniform weights on +-sqrt(6 / (fan_in + fan_out)), biases
// zero; the draw order (layer by layer, row-major) is part of the contract
// so a seed reproduces the network bit for bit.
inline DenseNetwork init_network(const DbnTopology& t, std::uint64_t seed) {
  DenseNetwork net;
  net.m = t.m;
  net.seed = seed;
  SplitMix64 gen(seed);
  for (std::size_t l = 1; l < t.widths.size(); ++l) {
    DenseLayer layer;
    const std::size_t fan_in = t.widths[l - 1], fan_out = t.widths[l];
    layer.weights = MatD(fan_in, fan_out);
    layer.bias.assign(fan_out, 0.0);
    layer.activation = t.activations[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : layer.weights.data()) w = (2.0 * gen.next_double() - 1.0) * limit;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

// Activations of every layer; [0] is the input batch, back() the output.
inline std::vector<MatD> forward(const DenseNetwork& net, const Dataset& batch) {
  if (batch.cols() != net.input_width())
    throw std::invalid_argument("forward: batch width does not match input layer");
  std::vector<MatD> acts;
  acts.reserve(net.layers.size() + 1);
  acts.push_back(batch);
  for (const auto& layer : net.layers) {
    const MatD& a = acts.back();
    MatD z(a.rows(), layer.weights.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) = layer.bias[c];
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const double ark = a(r, k);
        for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) += ark * layer.weights(k, c);
      }
    }
    for (double& v : z.data()) v = detail::activate(layer.activation, v);
    acts.push_back(std::move(z));
  }
  return acts;
}

inline MatD reconstruct(const DenseNetwork& net, const Dataset& data) {
  return forward(net, data).back();
}

// Mean over all entries of the squared difference.
inline double mse(const MatD& pred, const MatD& target) {
  if (!pred.same_shape(target)) throw std::invalid_argument("mse: shape mismatch");
  if (pred.empty()) throw std::invalid_argument("mse: empty matrices");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.data().size(); ++i) {
    const double d = pred.data()[i] - target.data()[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

struct Gradients {
  std::vector<MatD> weights;
  std::vector<std::vector<double>> bias;
};

// Gradients of the MSE loss with respect to every parameter.
inline Gradients backprop(const DenseNetwork& net, const Dataset& batch, const Dataset& target) {
  if (target.rows() != batch.rows() || target.cols() != net.output_width())
    throw std::invalid_argument("backprop: target shape mismatch");

  // Recompute pre-activations alongside the forward pass; activate_grad
  // needs z, not f(z).
  std::vector<MatD> acts{batch};
  std::vector<MatD> zs;
  for (const auto& layer : net.layers) {
    const MatD& a = acts.back();
    MatD z(a.rows(), layer.weights.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) = layer.bias[c];
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const double ark = a(r, k);
        for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) += ark * layer.weights(k, c);
      }
    }
    MatD a_next = z;
    for (double& v : a_next.data()) v = detail::activate(layer.activation, v);
    zs.push_back(std::move(z));
    acts.push_back(std::move(a_next));
  }

  const std::size_t layer_count = net.layers.size();
  Gradients grads;
  grads.weights.resize(layer_count);
  grads.bias.resize(layer_count);

  const double denom = static_cast<double>(target.size());
  MatD delta(batch.rows(), net.output_width());
  for (std::size_t i = 0; i < delta.data().size(); ++i)
    delta.data()[i] = 2.0 * (acts.back().data()[i] - target.data()[i]) / denom;
  for (std::size_t i = 0; i < delta.data().size(); ++i)
    delta.data()[i] *= detail::activate_grad(net.layers.back().activation, zs.back().data()[i]);

  for (std::size_t l = layer_count; l-- > 0;) {
    const MatD& a_prev = acts[l];
    MatD dw(a_prev.cols(), delta.cols());
    for (std::size_t r = 0; r < a_prev.rows(); ++r)
      for (std::size_t k = 0; k < a_prev.cols(); ++k) {
        const double av = a_prev(r, k);
        for (std::size_t c = 0; c < delta.cols(); ++c) dw(k, c) += av * delta(r, c);
      }
    std::vector<double> db(delta.cols(), 0.0);
    for (std::size_t r = 0; r < delta.rows(); ++r)
      for (std::size_t c = 0; c < delta.cols(); ++c) db[c] += delta(r, c);
    grads.weights[l] = std::move(dw);
    grads.bias[l] = std::move(db);

    if (l > 0) {
      const MatD& w = net.layers[l].weights;
      MatD next(delta.rows(), w.rows());
      for (std::size_t r = 0; r < delta.rows(); ++r)
        for (std::size_t c = 0; c < delta.cols(); ++c) {
          const double dv = delta(r, c);
          for (std::size_t k = 0; k < w.rows(); ++k) next(r, k) += dv * w(k, c);
        }
      for (std::size_t r = 0; r < next.rows(); ++r)
        for (std::size_t k = 0; k < next.cols(); ++k)
          next(r, k) *= detail::activate_grad(net.layers[l - 1].activation, zs[l - 1](r, k));
      delta = std::move(next);
    }
  }
  return grads;
}

// parameter <- parameter - lr * gradient, elementwise.
inline void sgd_step(DenseNetwork& net, const Gradients& grads, double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("sgd_step: lr must be positive");
  if (grads.weights.size() != net.layers.size())
    throw std::invalid_argument("sgd_step: gradient layer count mismatch");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (!all_finite(grads.weights[l])) throw numeric_error("sgd_step: non-finite weight gradient");
    for (double v : grads.bias[l])
      if (!std::isfinite(v)) throw numeric_error("sgd_step: non-finite bias gradient");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    for (std::size_t i = 0; i < layer.weights.data().size(); ++i)
      layer.weights.data()[i] -= lr * grads.weights[l].data()[i];
    for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= lr * grads.bias[l][i];
  }
}

struct TrainConfig {
  std::size_t epochs = 100;
  double lr = 0.01;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct TrainHistory {
  std::vector<double> epoch_mse;  // full-dataset MSE after each epoch
};

// Minibatch SGD fitting the inputs to themselves. Deterministic given the
// seed: shuffling draws from one splitmix64 stream, batches run in index
// order, the last short batch included.
inline TrainHistory train_autoencoder(DenseNetwork& net, const Dataset& data,
                                      const TrainConfig& cfg) {
  if (data.rows() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.cols() != net.m) throw std::invalid_argument("train: data width does not match M");
  if (cfg.batch < 1) throw std::invalid_argument("train: batch size must be >= 1");
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr))
    throw std::invalid_argument("train: lr must be positive");

  TrainHistory history;
  SplitMix64 gen(cfg.seed);
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) shuffle(std::span<std::size_t>(order), gen);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t stop = std::min(start + cfg.batch, order.size());
      Dataset batch(stop - start, data.cols());
      for (std::size_t i = start; i < stop; ++i)
        for (std::size_t c = 0; c < data.cols(); ++c) batch(i - start, c) = data(order[i], c);
      sgd_step(net, backprop(net, batch, batch), cfg.lr);
    }
    history.epoch_mse.push_back(mse(reconstruct(net, data), data));
  }
  return history;
}

// ---------------------------------------------------------------- model file

// Line format, decimal floats in round-trip precision:
//   kgae-model v1
//   m / seed / config lines
//   widths + activations
//   per layer: "layer <i>", one "w" line per input row, one "b" line
//   end
inline void write_model(std::ostream& out, const DenseNetwork& net, const TrainConfig& cfg) {
  out << "kgae-model v1\n";
  out << "m " << net.m << '\n';
  out << "seed " << net.seed << '\n';
  out << "config epochs " << cfg.epochs << " lr " << format_double(cfg.lr) << " batch "
      << cfg.batch << " seed " << cfg.seed << " shuffle " << (cfg.shuffle ? 1 : 0) << '\n';
  out << "widths";
  for (std::size_t w : net.widths()) out << ' ' << w;
  out << '\n';
  out << "activations none";
  for (const auto& layer : net.layers) out << ' ' << to_string(layer.activation);
  out << '\n';
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    out << "layer " << l << '\n';
    for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
      out << 'w';
      for (double v : layer.weights.row(r)) out << ' ' << format_double(v);
      out << '\n';
    }
    out << 'b';
    for (double v : layer.bias) out << ' ' << format_double(v);
    out << '\n';
  }
  out << "end\n";
}

struct ModelFile {
  DenseNetwork net;
  TrainConfig cfg;
};

inline ModelFile read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "kgae-model v1")
    throw io_error("model: missing 'kgae-model v1' header");

  ModelFile mf;
  std::vector<std::size_t> widths;
  std::vector<Activation> acts;
  auto expect_line = [&](const char* what) {
    if (!std::getline(in, line)) throw io_error(std::string("model: truncated before ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  expect_line("m");
  {
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key >> mf.net.m) || key != "m") throw io_error("model: bad m line");
  }
  expect_line("seed");
  {
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key >> mf.net.seed) || key != "seed") throw io_error("model: bad seed line");
  }
  expect_line("config");
  {
    std::istringstream ss(line);
    std::string key, k1, k2, k3, k4, k5;
    std::string lr_tok;
    int shuffle_flag = 1;
    if (!(ss >> key >> k1 >> mf.cfg.epochs >> k2 >> lr_tok >> k3 >> mf.cfg.batch >> k4 >>
          mf.cfg.seed >> k5 >> shuffle_flag) ||
        key != "config" || k1 != "epochs" || k2 != "lr" || k3 != "batch" || k4 != "seed" ||
        k5 != "shuffle")
      throw io_error("model: bad config line");
    mf.cfg.lr = parse_double(lr_tok, "lr");
    mf.cfg.shuffle = shuffle_flag != 0;
  }
  expect_line("widths");
  {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key != "widths") throw io_error("model: bad widths line");
    std::size_t w;
    while (ss >> w) widths.push_back(w);
    if (widths.size() < 2) throw io_error("model: need at least two widths");
  }
  expect_line("activations");
  {
    std::istringstream ss(line);
    std::string key, tag;
    ss >> key;
    if (key != "activations") throw io_error("model: bad activations line");
    while (ss >> tag) acts.push_back(activation_from_string(tag));
    if (acts.size() != widths.size()) throw io_error("model: activation count != width count");
  }

  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    expect_line("layer");
    {
      std::istringstream ss(line);
      std::string key;
      std::size_t idx;
      if (!(ss >> key >> idx) || key != "layer" || idx != l)
        throw io_error("model: expected 'layer " + std::to_string(l) + "'");
    }
    DenseLayer layer;
    layer.activation = acts[l + 1];
    layer.weights = MatD(widths[l], widths[l + 1]);
    for (std::size_t r = 0; r < widths[l]; ++r) {
      expect_line("w");
      auto tok = split(line, ' ');
      if (tok.empty() || tok[0] != "w" || tok.size() != 1 + widths[l + 1])
        throw io_error("model: bad weight row in layer " + std::to_string(l));
      for (std::size_t c = 0; c < widths[l + 1]; ++c)
        layer.weights(r, c) = parse_double(tok[c + 1], "weight");
    }
    expect_line("b");
    {
      auto tok = split(line, ' ');
      if (tok.empty() || tok[0] != "b" || tok.size() != 1 + widths[l + 1])
        throw io_error("model: bad bias row in layer " + std::to_string(l));
      layer.bias.resize(widths[l + 1]);
      for (std::size_t c = 0; c < widths[l + 1]; ++c)
        layer.bias[c] = parse_double(tok[c + 1], "bias");
    }
    mf.net.layers.push_back(std::move(layer));
  }
  expect_line("end");
  if (line != "end") throw io_error("model: missing 'end'");
  if (mf.net.m != mf.net.layers.front().weights.rows())
    throw io_error("model: m does not match first layer width");
  return mf;
}

}  // namespace kgae

#include "wavegrasp/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string_view>

#include "binary_io.hpp"
#include "wavegrasp/errors.hpp"

namespace wavegrasp::nn {

namespace {

constexpr char kMagic[8] = {'W', 'G', 'M', 'L', 'P', 'N', 'E', 'T'};
constexpr std::uint32_t kMaxWidth = 1u << 16;
constexpr std::uint32_t kMaxLayers = 256;

void check_widths(const std::vector<int>& widths) {
  if (widths.size() < 2) throw ConfigError("mlp.widths", "need at least input and output widths");
  for (int w : widths) {
    if (w <= 0) throw ConfigError("mlp.widths", "widths must be positive");
  }
}

}  // namespace

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  check_widths(widths_);
  layers_.reserve(widths_.size() - 1);
  for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
    layers_.push_back({Matrix::Zero(widths_[i + 1], widths_[i]), Vector::Zero(widths_[i + 1])});
  }
}

Mlp Mlp::random(std::vector<int> widths, Rng& rng) {
  Mlp net(std::move(widths));
  for (auto& l : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    // Row-major draw order keeps initialization independent of storage order.
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = u(rng);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = u(rng);
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Vector Mlp::forward(const Vector& input) const {
  if (input.size() != input_size()) throw InputError("mlp forward: input size mismatch");
  Vector x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Vector y = layers_[i].weight * x + layers_[i].bias;
    if (i + 1 < layers_.size()) y = y.cwiseMax(0.0);
    x = std::move(y);
  }
  return x;
}

Matrix Mlp::forward(const Matrix& input, ForwardCache* cache) const {
  if (input.rows() != input_size()) throw InputError("mlp forward: input size mismatch");
  if (cache) {
    cache->inputs.resize(layers_.size());
    cache->inputs[0] = input;
  }
  Matrix x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix y(layers_[i].weight.rows(), x.cols());
    y.noalias() = layers_[i].weight * x;
    y.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) {
      y = y.cwiseMax(0.0);
      if (cache) cache->inputs[i + 1] = y;
    }
    x = std::move(y);
  }
  return x;
}

Matrix Mlp::backward(const ForwardCache& cache, const Matrix& grad_output, Gradients* grads,
                     bool want_input_grad) const {
  if (cache.inputs.size() != layers_.size()) throw ProtocolError("mlp backward: cache does not match network");
  if (grad_output.rows() != output_size() || grad_output.cols() != cache.inputs[0].cols()) {
    throw InputError("mlp backward: upstream gradient shape mismatch");
  }
  if (grads && grads->layers.size() != layers_.size()) *grads = zero_gradients();

  Matrix delta = grad_output;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Matrix& in = cache.inputs[k];
    if (grads) {
      grads->layers[k].weight.noalias() = delta * in.transpose();
      grads->layers[k].bias = delta.rowwise().sum();
    }
    if (k == 0 && !want_input_grad) return Matrix();
    Matrix prev(layers_[k].weight.cols(), delta.cols());
    prev.noalias() = layers_[k].weight.transpose() * delta;
    if (k > 0) {
      // ReLU: pass gradient only where the activation was positive.
      prev = (in.array() > 0.0).select(prev, 0.0);
    }
    delta = std::move(prev);
  }
  return delta;
}

Gradients Mlp::zero_gradients() const {
  Gradients g;
  g.layers.reserve(layers_.size());
  for (const auto& l : layers_) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return g;
}

bool Mlp::all_finite() const {
  return std::all_of(layers_.begin(), layers_.end(),
                     [](const Layer& l) { return l.weight.allFinite() && l.bias.allFinite(); });
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.widths() != online.widths()) throw InputError("soft_update: shape mismatch");
  for (std::size_t i = 0; i < target.layers().size(); ++i) {
    auto& t = target.layers()[i];
    const auto& o = online.layers()[i];
    t.weight = tau * o.weight + (1.0 - tau) * t.weight;
    t.bias = tau * o.bias + (1.0 - tau) * t.bias;
  }
}

void adam_update(std::span<double> params, std::span<const double> grads, AdamMoments& moments,
                 const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw InputError("adam: gradient size mismatch");
  if (moments.m.size() != params.size()) {
    moments.m.assign(params.size(), 0.0);
    moments.v.assign(params.size(), 0.0);
  }
  moments.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(moments.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(moments.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    moments.m[i] = cfg.beta1 * moments.m[i] + (1.0 - cfg.beta1) * g;
    moments.v[i] = cfg.beta2 * moments.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = moments.m[i] / bc1;
    const double v_hat = moments.v[i] / bc2;
    params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

AdamState::AdamState(const Mlp& net, AdamConfig cfg) : cfg_(cfg) {
  weight_moments_.resize(net.layer_count());
  bias_moments_.resize(net.layer_count());
}

void AdamState::apply(Mlp& net, const Gradients& grads) {
  if (weight_moments_.size() != net.layer_count() || grads.layers.size() != net.layer_count()) {
    throw InputError("adam: optimizer state does not match network");
  }
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    auto& l = net.layers()[i];
    const auto& g = grads.layers[i];
    adam_update({l.weight.data(), static_cast<std::size_t>(l.weight.size())},
                {g.weight.data(), static_cast<std::size_t>(g.weight.size())}, weight_moments_[i], cfg_);
    adam_update({l.bias.data(), static_cast<std::size_t>(l.bias.size())},
                {g.bias.data(), static_cast<std::size_t>(g.bias.size())}, bias_moments_[i], cfg_);
  }
  step_ += 1;
}

void serialize(const Mlp& net, std::ostream& out) {
  detail::ByteWriter w(out);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kMlpFormatVersion);
  w.u32(static_cast<std::uint32_t>(net.widths().size()));
  for (int width : net.widths()) w.u32(static_cast<std::uint32_t>(width));
  for (const auto& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.f64(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) w.f64(l.bias(r));
  }
}

std::string serialize(const Mlp& net) {
  std::ostringstream os(std::ios::binary);
  serialize(net, os);
  return std::move(os).str();
}

Mlp deserialize(std::istream& in) {
  detail::ByteReader r(in, "mlp");
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw CorruptCheckpointError("mlp: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kMlpFormatVersion) {
    throw CheckpointVersionError("mlp: unsupported format version " + std::to_string(version) +
                                 " (expected " + std::to_string(kMlpFormatVersion) + ")");
  }
  const std::uint32_t n = r.u32();
  if (n < 2 || n > kMaxLayers) throw CorruptCheckpointError("mlp: implausible layer count");
  std::vector<int> widths(n);
  for (auto& w : widths) {
    const std::uint32_t v = r.u32();
    if (v == 0 || v > kMaxWidth) throw CorruptCheckpointError("mlp: implausible width");
    w = static_cast<int>(v);
  }
  Mlp net(widths);
  for (auto& l : net.layers()) {
    for (Eigen::Index row = 0; row < l.weight.rows(); ++row) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(row, c) = r.f64();
    }
    for (Eigen::Index row = 0; row < l.bias.size(); ++row) l.bias(row) = r.f64();
  }
  return net;
}

Mlp deserialize(std::string_view bytes) {
  std::istringstream is(std::string(bytes), std::ios::binary);
  Mlp net = deserialize(is);
  if (is.peek() != std::char_traits<char>::eof()) throw CorruptCheckpointError("mlp: trailing bytes");
  return net;
}

}  // namespace wavegrasp::nn

#ifndef WAVEGRASP_MLP_HPP_
#define WAVEGRASP_MLP_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wavegrasp/rng.hpp"

namespace wavegrasp::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One dense layer: y = W x + b with W of shape (out, in).
struct Layer {
  Matrix weight;
  Vector bias;
};

// Activations kept by a batched forward pass for the backward pass.
// inputs[l] is the input of layer l; samples are columns.
struct ForwardCache {
  std::vector<Matrix> inputs;
};

// Parameter gradients, shaped like the network's layers.
struct Gradients {
  std::vector<Layer> layers;
};

// Fully connected network, ReLU on hidden layers and identity on the output.
// All arithmetic is in double precision.
class Mlp {
 public:
  Mlp() = default;
  // Zero-initialized network with the given widths (input, hidden..., output).
  explicit Mlp(std::vector<int> widths);

  // Uniform fan-in initialization: U(-1/sqrt(in), 1/sqrt(in)) for weights and biases.
  static Mlp random(std::vector<int> widths, Rng& rng);

  const std::vector<int>& widths() const { return widths_; }
  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t parameter_count() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  Vector forward(const Vector& input) const;

  // Batched forward; columns of `input` are samples. Fills `cache` when given.
  Matrix forward(const Matrix& input, ForwardCache* cache) const;

  // Reverse-mode pass for the batch cached by forward(). `grad_output` is
  // dL/dy with the same shape as the output. Parameter gradients are written
  // to `grads` when non-null; the input gradient is returned when
  // `want_input_grad` is set (an empty matrix otherwise).
  Matrix backward(const ForwardCache& cache, const Matrix& grad_output, Gradients* grads,
                  bool want_input_grad = true) const;

  Gradients zero_gradients() const;

  bool all_finite() const;

 private:
  std::vector<int> widths_;
  std::vector<Layer> layers_;
};

// target <- tau * online + (1 - tau) * target, parameter-wise.
void soft_update(Mlp& target, const Mlp& online, double tau);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam moments for a flat parameter block.
struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

// One bias-corrected Adam step on a flat parameter span.
void adam_update(std::span<double> params, std::span<const double> grads, AdamMoments& moments,
                 const AdamConfig& cfg);

// Adam optimizer state for a whole Mlp.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const Mlp& net, AdamConfig cfg);

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step() const { return step_; }

  void apply(Mlp& net, const Gradients& grads);

 private:
  AdamConfig cfg_;
  std::vector<AdamMoments> weight_moments_;
  std::vector<AdamMoments> bias_moments_;
  std::int64_t step_ = 0;
};

inline void adam_step(Mlp& net, const Gradients& grads, AdamState& state) { state.apply(net, grads); }

// Binary network format, all integers and reals little-endian:
//   8 bytes   magic "WGMLPNET"
//   u32       format version (kMlpFormatVersion)
//   u32       number of widths n (>= 2)
//   n x u32   widths
//   per layer l = 0..n-2: weight (out x in, row-major) then bias (out), f64 each
inline constexpr std::uint32_t kMlpFormatVersion = 1;

std::string serialize(const Mlp& net);
void serialize(const Mlp& net, std::ostream& out);

// Throws CorruptCheckpointError on truncation, bad magic or implausible
// sizes, and CheckpointVersionError on an unknown version.
Mlp deserialize(std::string_view bytes);
Mlp deserialize(std::istream& in);

}  // namespace wavegrasp::nn

#endif  // WAVEGRASP_MLP_HPP_

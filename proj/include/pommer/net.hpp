#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "pommer/config.hpp"
#include "pommer/featurize.hpp"
#include "pommer/rng.hpp"

namespace pommer {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Architecture fingerprint over (input_planes, channels, board_size, layer
// shapes); checkpoints refuse to load into a different architecture.
uint64_t architecture_hash(const NetConfig& cfg);

// Two-head convolutional policy/value network:
//   trunk: 4 convolutions of `channels` 3x3 kernels (stride 1, zero padding
//          keeps B x B), rectifier after each;
//   policy head: 2 kernels of 1x1, rectifier, affine map to 6 logits;
//   value head:  2 kernels of 1x1, rectifier, affine map to 1 scalar.
// Probabilities are the softmax of the logits; the value is unsquashed.
//
// Parameters are one flat array in this order (conv weights row-major
// [out][in][kr][kc], affine weights row-major [out][cell*2+head_channel]):
//   conv0 W,b | conv1 W,b | conv2 W,b | conv3 W,b |
//   policy 1x1 W,b | policy affine W,b | value 1x1 W,b | value affine W,b
//
// float is the speed path; the double instantiation exists for
// finite-difference gradient checks.
template <typename Scalar>
class ConvNet {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit ConvNet(const NetConfig& cfg);

  const NetConfig& config() const { return cfg_; }
  size_t param_count() const { return params_.size(); }
  std::vector<Scalar>& params() { return params_; }
  const std::vector<Scalar>& params() const { return params_; }
  uint64_t arch_hash() const { return architecture_hash(cfg_); }

  // He-style init: weights ~ N(0, sqrt(2/fan_in)), biases 0.
  void init_he(Rng& rng);

  struct Output {
    std::array<Scalar, kNumActions> probs;
    std::array<Scalar, kNumActions> logits;
    Scalar value;
  };

  // Scratch buffers; reusing one across calls avoids per-call allocation.
  // One workspace per thread; the net itself is immutable during forward.
  struct Workspace {
    Mat a0, cols, z1, z2, z3, z4, hp, hv;
  };

  // Single-observation forward; throws NumericError on non-finite outputs.
  Output forward(const FeatureStack& features, Workspace& ws) const;

  // Training path: batched forward caching everything backward needs.
  struct BatchCache {
    int batch = 0;
    Mat a0;                     // input [planes x N*P]
    std::array<Mat, 4> cols;    // im2col per trunk layer
    std::array<Mat, 4> act;     // post-relu activations
    Mat hp, hv;                 // head activations (post-relu)
    Mat logits;                 // [6 x N]
    Vec values;                 // [N]
  };
  void forward_batch(const std::vector<const FeatureStack*>& batch, BatchCache& cache) const;

  // Accumulates dLoss/dparams into grad (size param_count) given output
  // gradients: dlogits [6 x N] and dvalues [N].
  void backward_batch(const BatchCache& cache, const Mat& dlogits, const Vec& dvalues,
                      std::vector<Scalar>& grad) const;

 private:
  NetConfig cfg_;
  int pcells_ = 0;  // board_size^2
  std::vector<Scalar> params_;

  struct Layout {
    size_t conv_w[4], conv_b[4];
    size_t pconv_w, pconv_b, paff_w, paff_b;
    size_t vconv_w, vconv_b, vaff_w, vaff_b;
    size_t total;
  } layout_;
  void build_layout();

  void im2col(const Mat& src, int channels, int samples, Mat& cols) const;
  void col2im(const Mat& dcols, int channels, int samples, Mat& dsrc) const;
};

using ConvNetF = ConvNet<float>;
using ConvNetD = ConvNet<double>;

// Checkpoint: text header (format tag, architecture hash, shape, iteration,
// stage, config hash, parameter count) followed by raw little-endian float32
// parameters.
struct CheckpointMeta {
  int iteration = 0;
  int stage = 1;
  uint64_t config_hash = 0;
};

void save_checkpoint(const std::string& path, const ConvNet<float>& net,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  NetConfig config;
  std::vector<float> params;
  CheckpointMeta meta;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace pommer

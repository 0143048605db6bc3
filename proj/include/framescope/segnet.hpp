#ifndef FRAMESCOPE_SEGNET_HPP
#define FRAMESCOPE_SEGNET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "framescope/image.hpp"

namespace framescope {

/// H x W x C activation/logit tensor, row-major, channel-innermost.
struct Tensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int h, int w, int c)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, 0.0) {}

  double& at(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
};

struct SegConfig {
  int input_side = 64;
  int base_channels = 8;
  int depth = 3;
  int classes = 5;  // 4 defect/frame classes + background
  uint64_t seed = 0;

  void validate() const;  // throws ConfigInvalid
};

/// One convolution's shape and its offsets into the flat weight vector.
struct LayerSpec {
  std::string name;
  int kernel = 3;  // 1 or 3
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;
  size_t weight_offset = 0;  // [ky][kx][cin][cout]
  size_t bias_offset = 0;    // [cout]

  size_t weight_count() const {
    return static_cast<size_t>(kernel) * kernel * in_channels * out_channels;
  }
};

/// Residual encoder / skip decoder segmentation network.
///
/// stem 3x3 -> per level: stride-2 3x3 (doubling channels) + one residual
/// block (3x3, ReLU, 3x3, identity add, ReLU) -> decoder mirrors with
/// nearest-neighbor upsampling, skip concatenation and a 3x3 fuse conv ->
/// 1x1 head to class logits.
struct SegModel {
  SegConfig config;
  std::vector<LayerSpec> layers;
  std::vector<double> weights;  // all kernels and biases, layer order

  size_t parameter_count() const { return weights.size(); }
};

/// Deterministic He-style initialization from config.seed.
SegModel build_model(const SegConfig& config);

/// Full forward pass; logits at input resolution, `classes` channels.
Tensor forward(const SegModel& model, const ImageBuffer& image);

/// Mean per-pixel multi-class cross-entropy. Background is class 0; mask
/// overlaps resolve by priority Scratch > Dent > Bend > WindowFrame.
double loss_ce(const Tensor& logits, const MaskSet& masks);

/// Argmax decode; ties break to the lowest class index (background).
MaskSet predict(const SegModel& model, const ImageBuffer& image);

struct TrainConfig {
  double learning_rate = 1e-2;
  double momentum = 0.9;
  int steps = 100;
  int batch_size = 4;
  uint64_t seed = 0;

  void validate() const;  // throws ConfigInvalid
};

struct Sample {
  ImageBuffer image;
  MaskSet masks;
};

struct TrainHistory {
  std::vector<double> step_loss;
  std::vector<double> epoch_val_miou;
  double best_val_miou = 0.0;
  double loss_at_best = 0.0;
};

/// SGD with momentum; single precision, single threaded, deterministic.
/// Returns the weights achieving the best validation meanIoU.
SegModel train(const SegModel& model, const std::vector<Sample>& train_set,
               const std::vector<Sample>& val_set, const TrainConfig& tc,
               TrainHistory* history = nullptr);

struct GradCheckOptions {
  double epsilon = 1e-3;
  int probes = 50;
  uint64_t seed = 0;
  /// Self-test knob: scales the analytic gradient of the stem kernel so the
  /// check can demonstrate that it detects a broken gradient.
  double fault_scale = 1.0;
  /// When nonempty, these weight indices are probed instead of random ones.
  std::vector<size_t> probe_indices;
};

/// Central finite differences vs. analytic gradient on randomly probed
/// weights, double precision. Returns the max relative error
/// |ga - gn| / max(|ga|, |gn|, 1e-8).
double gradient_check(const SegModel& model, const Sample& sample,
                      const GradCheckOptions& opts = {});

/// Versioned little-endian binary checkpoint, bit-exact round trip.
void save_model(const SegModel& model, const std::string& path);
SegModel load_model(const std::string& path);

}  // namespace framescope

#endif

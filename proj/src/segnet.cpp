#include "framescope/segnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "framescope/metrics.hpp"
#include "framescope/rng.hpp"

namespace framescope {

namespace {

std::vector<LayerSpec> make_layers(const SegConfig& cfg, size_t* total) {
  std::vector<LayerSpec> layers;
  size_t off = 0;
  const auto add = [&](const std::string& name, int k, int cin, int cout,
                       int stride) {
    LayerSpec s;
    s.name = name;
    s.kernel = k;
    s.in_channels = cin;
    s.out_channels = cout;
    s.stride = stride;
    s.weight_offset = off;
    s.bias_offset = off + s.weight_count();
    off = s.bias_offset + cout;
    layers.push_back(s);
  };
  const int b = cfg.base_channels;
  add("stem", 3, 3, b, 1);
  int ch = b;
  for (int l = 1; l <= cfg.depth; ++l) {
    add("down" + std::to_string(l), 3, ch, 2 * ch, 2);
    ch *= 2;
    add("res" + std::to_string(l) + ".a", 3, ch, ch, 1);
    add("res" + std::to_string(l) + ".b", 3, ch, ch, 1);
  }
  for (int l = cfg.depth - 1; l >= 0; --l) {
    const int skip_ch = b << l;
    add("dec" + std::to_string(l), 3, 3 * skip_ch, skip_ch, 1);
  }
  add("head", 1, b, cfg.classes, 1);
  *total = off;
  return layers;
}

template <typename T>
struct Plane {
  int h = 0, w = 0, c = 0;
  std::vector<T> v;

  void resize(int hh, int ww, int cc) {
    h = hh;
    w = ww;
    c = cc;
    v.assign(static_cast<size_t>(hh) * ww * cc, T(0));
  }
};

// Direct convolution, kernel k in {1,3}, pad k/2, output h/stride x w/stride.
template <typename T>
void conv_forward(const Plane<T>& in, const T* weights, const T* bias, int k,
                  int stride, int cout, Plane<T>& out) {
  const int pad = k / 2;
  out.resize(in.h / stride, in.w / stride, cout);
  const int cin = in.c;
  std::vector<T> acc(cout);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      for (int co = 0; co < cout; ++co) acc[co] = bias[co];
      for (int ky = 0; ky < k; ++ky) {
        const int yi = y * stride + ky - pad;
        if (yi < 0 || yi >= in.h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int xi = x * stride + kx - pad;
          if (xi < 0 || xi >= in.w) continue;
          const T* ip = &in.v[(static_cast<size_t>(yi) * in.w + xi) * cin];
          const T* wp = &weights[static_cast<size_t>(ky * k + kx) * cin * cout];
          for (int ci = 0; ci < cin; ++ci) {
            const T a = ip[ci];
            const T* wr = wp + static_cast<size_t>(ci) * cout;
            for (int co = 0; co < cout; ++co) acc[co] += a * wr[co];
          }
        }
      }
      T* op = &out.v[(static_cast<size_t>(y) * out.w + x) * cout];
      for (int co = 0; co < cout; ++co) op[co] = acc[co];
    }
  }
}

template <typename T>
void conv_backward(const Plane<T>& in, const T* weights, int k, int stride,
                   int cout, const Plane<T>& d_out, Plane<T>& d_in, T* d_weights,
                   T* d_bias) {
  const int pad = k / 2;
  const int cin = in.c;
  d_in.resize(in.h, in.w, in.c);
  for (int y = 0; y < d_out.h; ++y) {
    for (int x = 0; x < d_out.w; ++x) {
      const T* g = &d_out.v[(static_cast<size_t>(y) * d_out.w + x) * cout];
      for (int co = 0; co < cout; ++co) d_bias[co] += g[co];
      for (int ky = 0; ky < k; ++ky) {
        const int yi = y * stride + ky - pad;
        if (yi < 0 || yi >= in.h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int xi = x * stride + kx - pad;
          if (xi < 0 || xi >= in.w) continue;
          const T* ip = &in.v[(static_cast<size_t>(yi) * in.w + xi) * cin];
          T* dip = &d_in.v[(static_cast<size_t>(yi) * in.w + xi) * cin];
          const size_t base = static_cast<size_t>(ky * k + kx) * cin * cout;
          for (int ci = 0; ci < cin; ++ci) {
            const T a = ip[ci];
            const T* wr = &weights[base + static_cast<size_t>(ci) * cout];
            T* dwr = &d_weights[base + static_cast<size_t>(ci) * cout];
            T s = 0;
            for (int co = 0; co < cout; ++co) {
              dwr[co] += a * g[co];
              s += wr[co] * g[co];
            }
            dip[ci] += s;
          }
        }
      }
    }
  }
}

template <typename T>
void relu_inplace(Plane<T>& p) {
  for (T& v : p.v)
    if (v < 0) v = 0;
}

// Post-activation values double as the ReLU mask (v > 0 iff pre > 0).
template <typename T>
void relu_backward(const Plane<T>& activated, Plane<T>& grad) {
  for (size_t i = 0; i < grad.v.size(); ++i)
    if (!(activated.v[i] > 0)) grad.v[i] = 0;
}

template <typename T>
void upsample2(const Plane<T>& in, Plane<T>& out) {
  out.resize(in.h * 2, in.w * 2, in.c);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      const T* ip = &in.v[(static_cast<size_t>(y / 2) * in.w + x / 2) * in.c];
      T* op = &out.v[(static_cast<size_t>(y) * out.w + x) * in.c];
      std::memcpy(op, ip, sizeof(T) * in.c);
    }
}

template <typename T>
void upsample2_backward(const Plane<T>& d_out, Plane<T>& d_in, int in_h, int in_w) {
  d_in.resize(in_h, in_w, d_out.c);
  for (int y = 0; y < d_out.h; ++y)
    for (int x = 0; x < d_out.w; ++x) {
      const T* gp = &d_out.v[(static_cast<size_t>(y) * d_out.w + x) * d_out.c];
      T* ip = &d_in.v[(static_cast<size_t>(y / 2) * in_w + x / 2) * d_out.c];
      for (int c = 0; c < d_out.c; ++c) ip[c] += gp[c];
    }
}

template <typename T>
void concat_channels(const Plane<T>& a, const Plane<T>& b, Plane<T>& out) {
  out.resize(a.h, a.w, a.c + b.c);
  for (int y = 0; y < a.h; ++y)
    for (int x = 0; x < a.w; ++x) {
      const size_t i = static_cast<size_t>(y) * a.w + x;
      std::memcpy(&out.v[i * out.c], &a.v[i * a.c], sizeof(T) * a.c);
      std::memcpy(&out.v[i * out.c + a.c], &b.v[i * b.c], sizeof(T) * b.c);
    }
}

template <typename T>
void split_channels(const Plane<T>& d_cat, int a_c, Plane<T>& d_a, Plane<T>& d_b) {
  d_a.resize(d_cat.h, d_cat.w, a_c);
  d_b.resize(d_cat.h, d_cat.w, d_cat.c - a_c);
  for (int y = 0; y < d_cat.h; ++y)
    for (int x = 0; x < d_cat.w; ++x) {
      const size_t i = static_cast<size_t>(y) * d_cat.w + x;
      std::memcpy(&d_a.v[i * a_c], &d_cat.v[i * d_cat.c], sizeof(T) * a_c);
      std::memcpy(&d_b.v[i * d_b.c], &d_cat.v[i * d_cat.c + a_c],
                  sizeof(T) * d_b.c);
    }
}

// Per-pixel label: 0 = background, otherwise 1 + ClassId, overlaps resolved
// by priority Scratch > Dent > Bend > WindowFrame.
int pixel_label(const MaskSet& masks, int x, int y) {
  static constexpr ClassId kPriority[] = {ClassId::Scratch, ClassId::Dent,
                                          ClassId::Bend, ClassId::WindowFrame};
  for (ClassId cls : kPriority)
    if (masks.plane(cls).at(x, y)) return 1 + static_cast<int>(cls);
  return 0;
}

// Cross-entropy over softmax; fills d_logits (already divided by pixel count)
// when non-null.
template <typename T>
double softmax_ce(const Plane<T>& logits, const MaskSet& masks,
                  Plane<T>* d_logits) {
  const int classes = logits.c;
  const size_t npix = static_cast<size_t>(logits.h) * logits.w;
  if (d_logits) d_logits->resize(logits.h, logits.w, classes);
  double loss = 0.0;
  std::vector<double> p(classes);
  for (int y = 0; y < logits.h; ++y) {
    for (int x = 0; x < logits.w; ++x) {
      const T* lp = &logits.v[(static_cast<size_t>(y) * logits.w + x) * classes];
      double m = lp[0];
      for (int c = 1; c < classes; ++c) m = std::max(m, static_cast<double>(lp[c]));
      double sum = 0.0;
      for (int c = 0; c < classes; ++c) {
        p[c] = std::exp(static_cast<double>(lp[c]) - m);
        sum += p[c];
      }
      const int label = pixel_label(masks, x, y);
      loss += -(static_cast<double>(lp[label]) - m - std::log(sum));
      if (d_logits) {
        T* gp = &d_logits->v[(static_cast<size_t>(y) * logits.w + x) * classes];
        for (int c = 0; c < classes; ++c) {
          const double q = p[c] / sum - (c == label ? 1.0 : 0.0);
          gp[c] = static_cast<T>(q / npix);
        }
      }
    }
  }
  return loss / npix;
}

// Forward/backward engine over a fixed SegModel architecture. Weights are a
// private copy in precision T; gradients align with the flat weight vector.
template <typename T>
class Engine {
 public:
  explicit Engine(const SegModel& model)
      : cfg_(model.config), layers_(model.layers) {
    weights_.assign(model.weights.begin(), model.weights.end());
  }

  std::vector<T>& weights() { return weights_; }
  const std::vector<T>& weights() const { return weights_; }

  const Plane<T>& forward(const ImageBuffer& image) {
    if (image.width != cfg_.input_side || image.height != cfg_.input_side)
      throw Error(ErrorKind::DimensionMismatch,
                  "image side does not match the model input side");
    input_.resize(image.height, image.width, 3);
    for (size_t i = 0; i < image.data.size(); ++i)
      input_.v[i] = static_cast<T>(image.data[i]);

    const int d = cfg_.depth;
    down_out_.resize(d);
    res_mid_.resize(d);
    res_out_.resize(d);
    dec_cat_.resize(d);
    dec_out_.resize(d);

    run_conv("stem", input_, stem_out_);
    relu_inplace(stem_out_);

    const Plane<T>* cur = &stem_out_;
    for (int l = 1; l <= d; ++l) {
      run_conv("down" + std::to_string(l), *cur, down_out_[l - 1]);
      relu_inplace(down_out_[l - 1]);
      run_conv("res" + std::to_string(l) + ".a", down_out_[l - 1], res_mid_[l - 1]);
      relu_inplace(res_mid_[l - 1]);
      run_conv("res" + std::to_string(l) + ".b", res_mid_[l - 1], res_out_[l - 1]);
      for (size_t i = 0; i < res_out_[l - 1].v.size(); ++i)
        res_out_[l - 1].v[i] += down_out_[l - 1].v[i];  // identity branch
      relu_inplace(res_out_[l - 1]);
      cur = &res_out_[l - 1];
    }

    for (int l = d - 1; l >= 0; --l) {
      Plane<T> up;
      upsample2(*cur, up);
      const Plane<T>& skip = l == 0 ? stem_out_ : res_out_[l - 1];
      concat_channels(up, skip, dec_cat_[l]);
      run_conv("dec" + std::to_string(l), dec_cat_[l], dec_out_[l]);
      relu_inplace(dec_out_[l]);
      cur = &dec_out_[l];
    }

    run_conv("head", *cur, logits_);
    return logits_;
  }

  /// Backprop from the cross-entropy loss; requires a preceding forward().
  /// Gradients overwrite grad(); returns the loss.
  double backward(const MaskSet& masks) {
    grad_.assign(weights_.size(), T(0));
    pending_skip_.resize(cfg_.depth);
    Plane<T> d_logits;
    const double loss = softmax_ce(logits_, masks, &d_logits);

    const int d = cfg_.depth;
    Plane<T> d_cur;
    back_conv("head", dec_out_.empty() ? stem_out_ : dec_out_[0], d_logits, d_cur);

    for (int l = 0; l <= d - 1; ++l) {
      relu_backward(dec_out_[l], d_cur);
      Plane<T> d_cat;
      back_conv("dec" + std::to_string(l), dec_cat_[l], d_cur, d_cat);
      const Plane<T>& below = l == d - 1 ? res_out_[d - 1] : dec_out_[l + 1];
      Plane<T> d_up, d_skip;
      split_channels(d_cat, below.c, d_up, d_skip);
      Plane<T> d_below;
      upsample2_backward(d_up, d_below, below.h, below.w);
      if (l == 0) {
        d_stem_extra_ = std::move(d_skip);
      } else {
        pending_skip_[l - 1] = std::move(d_skip);
      }
      d_cur = std::move(d_below);
    }

    for (int l = d; l >= 1; --l) {
      // d_cur is the gradient at res_out_[l-1]
      if (l <= d - 1) add_planes(d_cur, pending_skip_[l - 1]);
      relu_backward(res_out_[l - 1], d_cur);
      Plane<T> d_mid;
      back_conv("res" + std::to_string(l) + ".b", res_mid_[l - 1], d_cur, d_mid);
      relu_backward(res_mid_[l - 1], d_mid);
      Plane<T> d_down;
      back_conv("res" + std::to_string(l) + ".a", down_out_[l - 1], d_mid, d_down);
      add_planes(d_down, d_cur);  // identity branch
      relu_backward(down_out_[l - 1], d_down);
      const Plane<T>& below = l == 1 ? stem_out_ : res_out_[l - 2];
      Plane<T> d_below;
      back_conv("down" + std::to_string(l), below, d_down, d_below);
      d_cur = std::move(d_below);
    }

    add_planes(d_cur, d_stem_extra_);
    relu_backward(stem_out_, d_cur);
    Plane<T> d_input;
    back_conv("stem", input_, d_cur, d_input);
    return loss;
  }

  const std::vector<T>& grad() const { return grad_; }

  double loss_only(const ImageBuffer& image, const MaskSet& masks) {
    forward(image);
    return softmax_ce<T>(logits_, masks, nullptr);
  }

  MaskSet predict_current(const ImageBuffer& image) {
    const Plane<T>& lg = forward(image);
    MaskSet out(lg.w, lg.h);
    for (int y = 0; y < lg.h; ++y)
      for (int x = 0; x < lg.w; ++x) {
        const T* lp = &lg.v[(static_cast<size_t>(y) * lg.w + x) * lg.c];
        int best = 0;
        for (int c = 1; c < lg.c; ++c)
          if (lp[c] > lp[best]) best = c;
        if (best > 0)
          out.planes[best - 1].at(x, y) = 1;
      }
    return out;
  }

  std::vector<double> weights_as_double() const {
    return std::vector<double>(weights_.begin(), weights_.end());
  }

 private:
  size_t index_of(const std::string& name) const {
    for (size_t i = 0; i < layers_.size(); ++i)
      if (layers_[i].name == name) return i;
    throw Error(ErrorKind::ConfigInvalid, "no layer named " + name);
  }

  void run_conv(const std::string& name, const Plane<T>& in, Plane<T>& out) {
    const LayerSpec& l = layers_[index_of(name)];
    conv_forward(in, &weights_[l.weight_offset], &weights_[l.bias_offset],
                 l.kernel, l.stride, l.out_channels, out);
  }

  void back_conv(const std::string& name, const Plane<T>& in, const Plane<T>& d_out,
                 Plane<T>& d_in) {
    const LayerSpec& l = layers_[index_of(name)];
    conv_backward(in, &weights_[l.weight_offset], l.kernel, l.stride,
                  l.out_channels, d_out, d_in, &grad_[l.weight_offset],
                  &grad_[l.bias_offset]);
  }

  static void add_planes(Plane<T>& a, const Plane<T>& b) {
    for (size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
  }

  SegConfig cfg_;
  std::vector<LayerSpec> layers_;
  std::vector<T> weights_;
  std::vector<T> grad_;

  Plane<T> input_, stem_out_, logits_;
  std::vector<Plane<T>> down_out_, res_mid_, res_out_, dec_cat_, dec_out_;
  std::vector<Plane<T>> pending_skip_;
  Plane<T> d_stem_extra_;
};

}  // namespace

void SegConfig::validate() const {
  if (depth < 1) throw Error(ErrorKind::ConfigInvalid, "depth must be >= 1");
  if (base_channels < 1)
    throw Error(ErrorKind::ConfigInvalid, "base_channels must be >= 1");
  if (classes < 2) throw Error(ErrorKind::ConfigInvalid, "need >= 2 classes");
  if (input_side < 1 || input_side % (1 << depth) != 0)
    throw Error(ErrorKind::ConfigInvalid,
                "input_side must be divisible by 2^depth");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0))
    throw Error(ErrorKind::ConfigInvalid, "learning_rate must be > 0");
  if (momentum < 0 || momentum >= 1)
    throw Error(ErrorKind::ConfigInvalid, "momentum must lie in [0,1)");
  if (steps < 1) throw Error(ErrorKind::ConfigInvalid, "steps must be >= 1");
  if (batch_size < 1)
    throw Error(ErrorKind::ConfigInvalid, "batch_size must be >= 1");
}

SegModel build_model(const SegConfig& config) {
  config.validate();
  SegModel model;
  model.config = config;
  size_t total = 0;
  model.layers = make_layers(config, &total);
  model.weights.assign(total, 0.0);

  Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + 0x1234567ULL);
  for (const LayerSpec& l : model.layers) {
    const double fan_in = static_cast<double>(l.kernel) * l.kernel * l.in_channels;
    const double stddev = std::sqrt(2.0 / fan_in);
    for (size_t i = 0; i < l.weight_count(); ++i)
      model.weights[l.weight_offset + i] = stddev * rng.gaussian();
    // biases stay zero
  }
  return model;
}

Tensor forward(const SegModel& model, const ImageBuffer& image) {
  Engine<double> eng(model);
  const Plane<double>& logits = eng.forward(image);
  Tensor out(logits.h, logits.w, logits.c);
  out.data = logits.v;
  return out;
}

double loss_ce(const Tensor& logits, const MaskSet& masks) {
  if (logits.height != masks.height || logits.width != masks.width)
    throw Error(ErrorKind::ShapeMismatch, "logits/mask dimensions differ");
  Plane<double> p;
  p.h = logits.height;
  p.w = logits.width;
  p.c = logits.channels;
  p.v = logits.data;
  return softmax_ce<double>(p, masks, nullptr);
}

MaskSet predict(const SegModel& model, const ImageBuffer& image) {
  Engine<double> eng(model);
  return eng.predict_current(image);
}

SegModel train(const SegModel& model, const std::vector<Sample>& train_set,
               const std::vector<Sample>& val_set, const TrainConfig& tc,
               TrainHistory* history) {
  tc.validate();
  model.config.validate();
  if (train_set.empty() || val_set.empty())
    throw Error(ErrorKind::InsufficientData,
                "train and validation sets must be non-empty");

  Engine<float> eng(model);
  const size_t n_params = eng.weights().size();
  std::vector<float> velocity(n_params, 0.0f);
  std::vector<float> grad_acc(n_params, 0.0f);

  TrainHistory local;
  TrainHistory& hist = history ? *history : local;
  hist = TrainHistory{};

  const int n_train = static_cast<int>(train_set.size());
  const int epoch_len = (n_train + tc.batch_size - 1) / tc.batch_size;

  std::vector<int> order(n_train);
  for (int i = 0; i < n_train; ++i) order[i] = i;

  std::vector<float> best_weights = eng.weights();
  double best_miou = -1.0;
  double loss_at_best = 0.0;
  double last_loss = 0.0;

  const auto eval_val = [&]() {
    std::vector<MaskSet> preds, truths;
    preds.reserve(val_set.size());
    for (const Sample& s : val_set) {
      preds.push_back(eng.predict_current(s.image));
      truths.push_back(s.masks);
    }
    std::vector<ClassId> classes(kAllClasses.begin(), kAllClasses.end());
    try {
      return mean_iou(preds, truths, classes).overall;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::EmptyEvaluation) return 0.0;
      throw;
    }
  };

  int step = 0;
  int epoch = 0;
  int last_eval_step = -1;
  while (step < tc.steps) {
    // deterministic per-epoch shuffle
    Rng shuffle(tc.seed ^ (0xC0FFEEULL + 0x9E37ULL * static_cast<uint64_t>(epoch)));
    for (int i = n_train - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle.next() % static_cast<uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    for (int b = 0; b < epoch_len && step < tc.steps; ++b) {
      std::fill(grad_acc.begin(), grad_acc.end(), 0.0f);
      const int start = b * tc.batch_size;
      const int count = std::min(tc.batch_size, n_train - start);
      double batch_loss = 0.0;
      for (int k = 0; k < count; ++k) {
        const Sample& s = train_set[order[start + k]];
        eng.forward(s.image);
        batch_loss += eng.backward(s.masks);
        const std::vector<float>& g = eng.grad();
        for (size_t i = 0; i < n_params; ++i) grad_acc[i] += g[i];
      }
      batch_loss /= count;
      if (!std::isfinite(batch_loss))
        throw Error(ErrorKind::NonFiniteLoss,
                    "training diverged at step " + std::to_string(step));
      const float lr = static_cast<float>(tc.learning_rate);
      const float mu = static_cast<float>(tc.momentum);
      const float inv = 1.0f / count;
      std::vector<float>& w = eng.weights();
      for (size_t i = 0; i < n_params; ++i) {
        velocity[i] = mu * velocity[i] - lr * grad_acc[i] * inv;
        w[i] += velocity[i];
      }
      hist.step_loss.push_back(batch_loss);
      last_loss = batch_loss;
      ++step;
    }
    const double miou = eval_val();
    hist.epoch_val_miou.push_back(miou);
    last_eval_step = step;
    if (miou > best_miou) {
      best_miou = miou;
      best_weights = eng.weights();
      loss_at_best = last_loss;
    }
    ++epoch;
  }
  if (last_eval_step != step) {
    const double miou = eval_val();
    hist.epoch_val_miou.push_back(miou);
    if (miou > best_miou) {
      best_miou = miou;
      best_weights = eng.weights();
      loss_at_best = last_loss;
    }
  }

  hist.best_val_miou = std::max(best_miou, 0.0);
  hist.loss_at_best = loss_at_best;

  SegModel out = model;
  out.weights.assign(best_weights.begin(), best_weights.end());
  return out;
}

double gradient_check(const SegModel& model, const Sample& sample,
                      const GradCheckOptions& opts) {
  Engine<double> eng(model);
  eng.forward(sample.image);
  eng.backward(sample.masks);
  std::vector<double> analytic = eng.grad();

  if (opts.fault_scale != 1.0) {
    const LayerSpec& stem = model.layers.front();
    for (size_t i = 0; i < stem.weight_count(); ++i)
      analytic[stem.weight_offset + i] *= opts.fault_scale;
  }

  Rng rng(opts.seed ^ 0xFEEDFACEULL);
  double max_rel = 0.0;
  std::vector<double>& w = eng.weights();
  const int probes = opts.probe_indices.empty()
                         ? opts.probes
                         : static_cast<int>(opts.probe_indices.size());
  for (int p = 0; p < probes; ++p) {
    const size_t idx = opts.probe_indices.empty() ? rng.next() % w.size()
                                                  : opts.probe_indices[p];
    const double orig = w[idx];
    w[idx] = orig + opts.epsilon;
    const double lp = eng.loss_only(sample.image, sample.masks);
    w[idx] = orig - opts.epsilon;
    const double lm = eng.loss_only(sample.image, sample.masks);
    w[idx] = orig;
    const double numeric = (lp - lm) / (2.0 * opts.epsilon);
    const double ga = analytic[idx];
    const double rel = std::abs(ga - numeric) /
                       std::max({std::abs(ga), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

namespace {
constexpr char kMagic[4] = {'F', 'S', 'G', '1'};
}

void save_model(const SegModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  out.write(kMagic, 4);
  const int32_t header[4] = {model.config.input_side, model.config.base_channels,
                             model.config.depth, model.config.classes};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  const uint64_t seed = model.config.seed;
  out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
  const uint64_t count = model.weights.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(model.weights.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw Error(ErrorKind::IoError, "short write to " + path);
}

SegModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(ErrorKind::ParseError, "not a model checkpoint: " + path);
  int32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  uint64_t seed = 0, count = 0;
  in.read(reinterpret_cast<char*>(&seed), sizeof(seed));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  SegConfig cfg;
  cfg.input_side = header[0];
  cfg.base_channels = header[1];
  cfg.depth = header[2];
  cfg.classes = header[3];
  cfg.seed = seed;
  SegModel model = build_model(cfg);
  if (count != model.weights.size())
    throw Error(ErrorKind::ParseError, "checkpoint weight count mismatch");
  in.read(reinterpret_cast<char*>(model.weights.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw Error(ErrorKind::ParseError, "truncated checkpoint: " + path);
  return model;
}

}  // namespace framescope

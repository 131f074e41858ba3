#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "mrs/tensor.hpp"
#include "mrs/text.hpp"

namespace mrs {

enum class ParamKind { Weight, Bias, Scale, Shift };

/// A trainable buffer paired with its gradient buffer of identical shape.
struct ParamRef {
  std::vector<double>* value;
  std::vector<double>* grad;
  ParamKind kind;
};

/// One network stage. forward() caches whatever backward() needs; backward()
/// accumulates into the parameter gradient buffers and returns the gradient
/// with respect to its input.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string describe() const = 0;
  virtual Tensor forward(const Tensor& input, bool training) = 0;
  virtual Tensor backward(const Tensor& grad_output) = 0;
  virtual std::vector<ParamRef> parameters() { return {}; }
  virtual std::vector<std::vector<double>*> state_buffers() { return {}; }

  void zero_grad() {
    for (const ParamRef& p : parameters()) {
      std::fill(p.grad->begin(), p.grad->end(), 0.0);
    }
  }
};

// --- dense ----------------------------------------------------------------

/// Fully connected layer. Inputs of rank > 2 are treated as flattened
/// per-sample features; the input gradient is returned in the original shape.
class DenseLayer final : public Layer {
 public:
  DenseLayer(std::size_t in, std::size_t out)
      : in_(in),
        out_(out),
        weight_(in * out, 0.0),
        bias_(out, 0.0),
        weight_grad_(in * out, 0.0),
        bias_grad_(out, 0.0) {
    if (in == 0 || out == 0) throw std::invalid_argument("dense: zero size");
  }

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }

  std::string describe() const override {
    return "dense " + std::to_string(in_) + " " + std::to_string(out_);
  }

  Tensor forward(const Tensor& input, bool /*training*/) override {
    const std::size_t b = input.batch();
    if (b == 0 || input.size() != b * in_) {
      throw std::invalid_argument("dense: expected " + std::to_string(in_) +
                                  " features per sample, got input " +
                                  input.shape_string());
    }
    input_ = input;
    Tensor out({b, out_});
    for (std::size_t s = 0; s < b; ++s) {
      const double* x = input.data.data() + s * in_;
      double* y = out.data.data() + s * out_;
      for (std::size_t o = 0; o < out_; ++o) {
        const double* w = weight_.data() + o * in_;
        double acc = bias_[o];
        for (std::size_t i = 0; i < in_; ++i) acc += w[i] * x[i];
        y[o] = acc;
      }
    }
    return out;
  }

  Tensor backward(const Tensor& grad_output) override {
    const std::size_t b = input_.batch();
    if (grad_output.size() != b * out_) {
      throw std::invalid_argument("dense: gradient shape mismatch");
    }
    Tensor grad_in(input_.shape);
    for (std::size_t s = 0; s < b; ++s) {
      const double* x = input_.data.data() + s * in_;
      const double* g = grad_output.data.data() + s * out_;
      double* gx = grad_in.data.data() + s * in_;
      for (std::size_t o = 0; o < out_; ++o) {
        const double go = g[o];
        if (go == 0.0) continue;
        double* wg = weight_grad_.data() + o * in_;
        const double* w = weight_.data() + o * in_;
        for (std::size_t i = 0; i < in_; ++i) {
          wg[i] += go * x[i];
          gx[i] += go * w[i];
        }
        bias_grad_[o] += go;
      }
    }
    return grad_in;
  }

  std::vector<ParamRef> parameters() override {
    return {{&weight_, &weight_grad_, ParamKind::Weight},
            {&bias_, &bias_grad_, ParamKind::Bias}};
  }

 private:
  std::size_t in_, out_;
  std::vector<double> weight_, bias_, weight_grad_, bias_grad_;
  Tensor input_;
};

// --- 1-D convolution --------------------------------------------------------

class Conv1dLayer final : public Layer {
 public:
  Conv1dLayer(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
              std::size_t stride, std::size_t pad)
      : in_ch_(in_ch),
        out_ch_(out_ch),
        kernel_(kernel),
        stride_(stride),
        pad_(pad),
        weight_(out_ch * in_ch * kernel, 0.0),
        bias_(out_ch, 0.0),
        weight_grad_(weight_.size(), 0.0),
        bias_grad_(out_ch, 0.0) {
    if (kernel < 1 || stride < 1) {
      throw std::invalid_argument("conv1d: kernel and stride must be >= 1");
    }
  }

  static std::size_t output_length(std::size_t in_len, std::size_t kernel,
                                   std::size_t stride, std::size_t pad) {
    const std::size_t padded = in_len + 2 * pad;
    if (padded < kernel) throw std::invalid_argument("conv1d: input too short");
    return (padded - kernel) / stride + 1;
  }

  std::string describe() const override {
    return "conv1d " + std::to_string(in_ch_) + " " + std::to_string(out_ch_) +
           " " + std::to_string(kernel_) + " " + std::to_string(stride_) + " " +
           std::to_string(pad_);
  }

  Tensor forward(const Tensor& input, bool /*training*/) override {
    if (input.rank() != 3 || input.shape[1] != in_ch_) {
      throw std::invalid_argument("conv1d: expected [batch x " +
                                  std::to_string(in_ch_) + " x length], got " +
                                  input.shape_string());
    }
    const std::size_t b = input.shape[0];
    const std::size_t in_len = input.shape[2];
    const std::size_t out_len = output_length(in_len, kernel_, stride_, pad_);
    input_ = input;

    Tensor out({b, out_ch_, out_len});
    for (std::size_t s = 0; s < b; ++s) {
      for (std::size_t oc = 0; oc < out_ch_; ++oc) {
        double* y = out.data.data() + (s * out_ch_ + oc) * out_len;
        for (std::size_t t = 0; t < out_len; ++t) y[t] = bias_[oc];
        for (std::size_t ic = 0; ic < in_ch_; ++ic) {
          const double* x = input.data.data() + (s * in_ch_ + ic) * in_len;
          const double* w = weight_.data() + (oc * in_ch_ + ic) * kernel_;
          for (std::size_t t = 0; t < out_len; ++t) {
            const std::ptrdiff_t base =
                static_cast<std::ptrdiff_t>(t * stride_) -
                static_cast<std::ptrdiff_t>(pad_);
            double acc = 0.0;
            for (std::size_t k = 0; k < kernel_; ++k) {
              const std::ptrdiff_t j = base + static_cast<std::ptrdiff_t>(k);
              if (j >= 0 && j < static_cast<std::ptrdiff_t>(in_len)) {
                acc += w[k] * x[j];
              }
            }
            y[t] += acc;
          }
        }
      }
    }
    return out;
  }

  Tensor backward(const Tensor& grad_output) override {
    const std::size_t b = input_.shape[0];
    const std::size_t in_len = input_.shape[2];
    const std::size_t out_len = grad_output.shape[2];
    Tensor grad_in(input_.shape);

    for (std::size_t s = 0; s < b; ++s) {
      for (std::size_t oc = 0; oc < out_ch_; ++oc) {
        const double* g = grad_output.data.data() + (s * out_ch_ + oc) * out_len;
        for (std::size_t t = 0; t < out_len; ++t) bias_grad_[oc] += g[t];
        for (std::size_t ic = 0; ic < in_ch_; ++ic) {
          const double* x = input_.data.data() + (s * in_ch_ + ic) * in_len;
          double* gx = grad_in.data.data() + (s * in_ch_ + ic) * in_len;
          const double* w = weight_.data() + (oc * in_ch_ + ic) * kernel_;
          double* wg = weight_grad_.data() + (oc * in_ch_ + ic) * kernel_;
          for (std::size_t t = 0; t < out_len; ++t) {
            const double gt = g[t];
            if (gt == 0.0) continue;
            const std::ptrdiff_t base =
                static_cast<std::ptrdiff_t>(t * stride_) -
                static_cast<std::ptrdiff_t>(pad_);
            for (std::size_t k = 0; k < kernel_; ++k) {
              const std::ptrdiff_t j = base + static_cast<std::ptrdiff_t>(k);
              if (j >= 0 && j < static_cast<std::ptrdiff_t>(in_len)) {
                wg[k] += gt * x[j];
                gx[j] += gt * w[k];
              }
            }
          }
        }
      }
    }
    return grad_in;
  }

  std::vector<ParamRef> parameters() override {
    return {{&weight_, &weight_grad_, ParamKind::Weight},
            {&bias_, &bias_grad_, ParamKind::Bias}};
  }

 private:
  std::size_t in_ch_, out_ch_, kernel_, stride_, pad_;
  std::vector<double> weight_, bias_, weight_grad_, bias_grad_;
  Tensor input_;
};

// --- 1-D transposed convolution ---------------------------------------------

/// Weight layout [in_ch][out_ch][kernel]; out_len = (in_len-1)*stride - 2*pad + kernel.
class ConvT1dLayer final : public Layer {
 public:
  ConvT1dLayer(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
               std::size_t stride, std::size_t pad)
      : in_ch_(in_ch),
        out_ch_(out_ch),
        kernel_(kernel),
        stride_(stride),
        pad_(pad),
        weight_(in_ch * out_ch * kernel, 0.0),
        bias_(out_ch, 0.0),
        weight_grad_(weight_.size(), 0.0),
        bias_grad_(out_ch, 0.0) {
    if (kernel < 1 || stride < 1) {
      throw std::invalid_argument("convt1d: kernel and stride must be >= 1");
    }
  }

  static std::size_t output_length(std::size_t in_len, std::size_t kernel,
                                   std::size_t stride, std::size_t pad) {
    const std::ptrdiff_t len = static_cast<std::ptrdiff_t>((in_len - 1) * stride) -
                               2 * static_cast<std::ptrdiff_t>(pad) +
                               static_cast<std::ptrdiff_t>(kernel);
    if (in_len < 1 || len < 1) {
      throw std::invalid_argument("convt1d: invalid output length");
    }
    return static_cast<std::size_t>(len);
  }

  std::string describe() const override {
    return "convt1d " + std::to_string(in_ch_) + " " + std::to_string(out_ch_) +
           " " + std::to_string(kernel_) + " " + std::to_string(stride_) + " " +
           std::to_string(pad_);
  }

  Tensor forward(const Tensor& input, bool /*training*/) override {
    if (input.rank() != 3 || input.shape[1] != in_ch_) {
      throw std::invalid_argument("convt1d: expected [batch x " +
                                  std::to_string(in_ch_) + " x length], got " +
                                  input.shape_string());
    }
    const std::size_t b = input.shape[0];
    const std::size_t in_len = input.shape[2];
    const std::size_t out_len = output_length(in_len, kernel_, stride_, pad_);
    input_ = input;

    Tensor out({b, out_ch_, out_len});
    for (std::size_t s = 0; s < b; ++s) {
      for (std::size_t oc = 0; oc < out_ch_; ++oc) {
        double* y = out.data.data() + (s * out_ch_ + oc) * out_len;
        for (std::size_t t = 0; t < out_len; ++t) y[t] = bias_[oc];
      }
      for (std::size_t ic = 0; ic < in_ch_; ++ic) {
        const double* x = input.data.data() + (s * in_ch_ + ic) * in_len;
        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
          double* y = out.data.data() + (s * out_ch_ + oc) * out_len;
          const double* w = weight_.data() + (ic * out_ch_ + oc) * kernel_;
          for (std::size_t j = 0; j < in_len; ++j) {
            const double xj = x[j];
            if (xj == 0.0) continue;
            const std::ptrdiff_t base =
                static_cast<std::ptrdiff_t>(j * stride_) -
                static_cast<std::ptrdiff_t>(pad_);
            for (std::size_t k = 0; k < kernel_; ++k) {
              const std::ptrdiff_t t = base + static_cast<std::ptrdiff_t>(k);
              if (t >= 0 && t < static_cast<std::ptrdiff_t>(out_len)) {
                y[t] += xj * w[k];
              }
            }
          }
        }
      }
    }
    return out;
  }

  Tensor backward(const Tensor& grad_output) override {
    const std::size_t b = input_.shape[0];
    const std::size_t in_len = input_.shape[2];
    const std::size_t out_len = grad_output.shape[2];
    Tensor grad_in(input_.shape);

    for (std::size_t s = 0; s < b; ++s) {
      for (std::size_t oc = 0; oc < out_ch_; ++oc) {
        const double* g = grad_output.data.data() + (s * out_ch_ + oc) * out_len;
        for (std::size_t t = 0; t < out_len; ++t) bias_grad_[oc] += g[t];
      }
      for (std::size_t ic = 0; ic < in_ch_; ++ic) {
        const double* x = input_.data.data() + (s * in_ch_ + ic) * in_len;
        double* gx = grad_in.data.data() + (s * in_ch_ + ic) * in_len;
        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
          const double* g = grad_output.data.data() + (s * out_ch_ + oc) * out_len;
          const double* w = weight_.data() + (ic * out_ch_ + oc) * kernel_;
          double* wg = weight_grad_.data() + (ic * out_ch_ + oc) * kernel_;
          for (std::size_t j = 0; j < in_len; ++j) {
            const std::ptrdiff_t base =
                static_cast<std::ptrdiff_t>(j * stride_) -
                static_cast<std::ptrdiff_t>(pad_);
            double acc = 0.0;
            for (std::size_t k = 0; k < kernel_; ++k) {
              const std::ptrdiff_t t = base + static_cast<std::ptrdiff_t>(k);
              if (t >= 0 && t < static_cast<std::ptrdiff_t>(out_len)) {
                acc += g[t] * w[k];
                wg[k] += g[t] * x[j];
              }
            }
            gx[j] += acc;
          }
        }
      }
    }
    return grad_in;
  }

  std::vector<ParamRef> parameters() override {
    return {{&weight_, &weight_grad_, ParamKind::Weight},
            {&bias_, &bias_grad_, ParamKind::Bias}};
  }

 private:
  std::size_t in_ch_, out_ch_, kernel_, stride_, pad_;
  std::vector<double> weight_, bias_, weight_grad_, bias_grad_;
  Tensor input_;
};

// --- batch normalization ------------------------------------------------------

/// Per-feature standardization with learned scale/shift. Rank-2 inputs
/// normalize over the batch; rank-3 inputs treat dim 1 as the feature
/// (channel) axis and normalize over batch x length. Training mode uses batch
/// statistics and updates running statistics; inference uses the running ones.
class BatchNorm1dLayer final : public Layer {
 public:
  BatchNorm1dLayer(std::size_t features, double eps = 1e-5, double momentum = 0.1)
      : features_(features),
        eps_(eps),
        momentum_(momentum),
        scale_(features, 1.0),
        shift_(features, 0.0),
        scale_grad_(features, 0.0),
        shift_grad_(features, 0.0),
        running_mean_(features, 0.0),
        running_var_(features, 1.0) {
    if (features == 0) throw std::invalid_argument("batchnorm: zero features");
  }

  std::string describe() const override {
    return "batchnorm1d " + std::to_string(features_) + " " + format_double(eps_) +
           " " + format_double(momentum_);
  }

  Tensor forward(const Tensor& input, bool training) override {
    setup_geometry(input);
    training_ = training;
    input_shape_ = input.shape;
    normalized_.assign(input.size(), 0.0);
    inv_std_.assign(features_, 0.0);

    Tensor out(input.shape);
    if (training) {
      for (std::size_t f = 0; f < features_; ++f) {
        double mean = 0.0;
        for_feature(input, f, [&](double x, std::size_t) { mean += x; });
        mean /= static_cast<double>(per_feature_);
        double var = 0.0;
        for_feature(input, f, [&](double x, std::size_t) {
          const double c = x - mean;
          var += c * c;
        });
        var /= static_cast<double>(per_feature_);
        const double inv = 1.0 / std::sqrt(var + eps_);
        inv_std_[f] = inv;
        running_mean_[f] = (1.0 - momentum_) * running_mean_[f] + momentum_ * mean;
        running_var_[f] = (1.0 - momentum_) * running_var_[f] + momentum_ * var;
        for_feature(input, f, [&](double x, std::size_t idx) {
          const double xhat = (x - mean) * inv;
          normalized_[idx] = xhat;
          out.data[idx] = scale_[f] * xhat + shift_[f];
        });
      }
    } else {
      for (std::size_t f = 0; f < features_; ++f) {
        const double inv = 1.0 / std::sqrt(running_var_[f] + eps_);
        inv_std_[f] = inv;
        const double mean = running_mean_[f];
        for_feature(input, f, [&](double x, std::size_t idx) {
          const double xhat = (x - mean) * inv;
          normalized_[idx] = xhat;
          out.data[idx] = scale_[f] * xhat + shift_[f];
        });
      }
    }
    return out;
  }

  Tensor backward(const Tensor& grad_output) override {
    if (grad_output.shape != input_shape_) {
      throw std::invalid_argument("batchnorm: gradient shape mismatch");
    }
    Tensor grad_in(input_shape_);
    const double n = static_cast<double>(per_feature_);
    for (std::size_t f = 0; f < features_; ++f) {
      double sum_g = 0.0, sum_gx = 0.0;
      for_feature(grad_output, f, [&](double g, std::size_t idx) {
        sum_g += g;
        sum_gx += g * normalized_[idx];
      });
      scale_grad_[f] += sum_gx;
      shift_grad_[f] += sum_g;
      const double coeff = scale_[f] * inv_std_[f];
      if (training_) {
        const double mean_g = sum_g / n;
        const double mean_gx = sum_gx / n;
        for_feature(grad_output, f, [&](double g, std::size_t idx) {
          grad_in.data[idx] = coeff * (g - mean_g - normalized_[idx] * mean_gx);
        });
      } else {
        for_feature(grad_output, f, [&](double g, std::size_t idx) {
          grad_in.data[idx] = coeff * g;
        });
      }
    }
    return grad_in;
  }

  std::vector<ParamRef> parameters() override {
    return {{&scale_, &scale_grad_, ParamKind::Scale},
            {&shift_, &shift_grad_, ParamKind::Shift}};
  }

  std::vector<std::vector<double>*> state_buffers() override {
    return {&running_mean_, &running_var_};
  }

  void reset_running_stats() {
    std::fill(running_mean_.begin(), running_mean_.end(), 0.0);
    std::fill(running_var_.begin(), running_var_.end(), 1.0);
  }

 private:
  void setup_geometry(const Tensor& input) {
    if (input.rank() == 2) {
      if (input.shape[1] != features_) {
        throw std::invalid_argument("batchnorm: expected " +
                                    std::to_string(features_) +
                                    " features, got " + input.shape_string());
      }
      batch_ = input.shape[0];
      length_ = 1;
    } else if (input.rank() == 3) {
      if (input.shape[1] != features_) {
        throw std::invalid_argument("batchnorm: expected " +
                                    std::to_string(features_) +
                                    " channels, got " + input.shape_string());
      }
      batch_ = input.shape[0];
      length_ = input.shape[2];
    } else {
      throw std::invalid_argument("batchnorm: rank-2 or rank-3 input required");
    }
    per_feature_ = batch_ * length_;
    if (per_feature_ < 2) {
      throw std::invalid_argument("batchnorm: need at least 2 values per feature");
    }
  }

  template <typename Fn>
  void for_feature(const Tensor& t, std::size_t f, Fn&& fn) const {
    for (std::size_t b = 0; b < batch_; ++b) {
      const std::size_t base = (b * features_ + f) * length_;
      for (std::size_t l = 0; l < length_; ++l) {
        fn(t.data[base + l], base + l);
      }
    }
  }

  std::size_t features_;
  double eps_, momentum_;
  std::vector<double> scale_, shift_, scale_grad_, shift_grad_;
  std::vector<double> running_mean_, running_var_;

  // forward cache
  bool training_ = true;
  std::size_t batch_ = 0, length_ = 1, per_feature_ = 0;
  std::vector<std::size_t> input_shape_;
  std::vector<double> normalized_, inv_std_;
};

// --- activations ------------------------------------------------------------

enum class Activation { ReLU, LeakyReLU, TanH, Sigmoid };

class ActivationLayer final : public Layer {
 public:
  explicit ActivationLayer(Activation kind, double slope = 0.2)
      : kind_(kind), slope_(slope) {}

  Activation kind() const { return kind_; }
  double slope() const { return slope_; }

  std::string describe() const override {
    switch (kind_) {
      case Activation::ReLU: return "relu";
      case Activation::LeakyReLU: return "leakyrelu " + format_double(slope_);
      case Activation::TanH: return "tanh";
      case Activation::Sigmoid: return "sigmoid";
    }
    throw std::invalid_argument("invalid activation");
  }

  Tensor forward(const Tensor& input, bool /*training*/) override {
    Tensor out(input.shape);
    switch (kind_) {
      case Activation::ReLU:
        for (std::size_t i = 0; i < input.size(); ++i) {
          out.data[i] = input.data[i] > 0.0 ? input.data[i] : 0.0;
        }
        cache_ = input;
        break;
      case Activation::LeakyReLU:
        for (std::size_t i = 0; i < input.size(); ++i) {
          const double x = input.data[i];
          out.data[i] = x > 0.0 ? x : slope_ * x;
        }
        cache_ = input;
        break;
      case Activation::TanH:
        for (std::size_t i = 0; i < input.size(); ++i) {
          out.data[i] = std::tanh(input.data[i]);
        }
        cache_ = out;
        break;
      case Activation::Sigmoid:
        for (std::size_t i = 0; i < input.size(); ++i) {
          const double y = 1.0 / (1.0 + std::exp(-input.data[i]));
          out.data[i] = std::clamp(y, 1e-15, 1.0 - 1e-15);
        }
        cache_ = out;
        break;
    }
    return out;
  }

  Tensor backward(const Tensor& grad_output) override {
    if (grad_output.size() != cache_.size()) {
      throw std::invalid_argument("activation: gradient shape mismatch");
    }
    Tensor grad_in(cache_.shape);
    switch (kind_) {
      case Activation::ReLU:
        for (std::size_t i = 0; i < cache_.size(); ++i) {
          grad_in.data[i] = cache_.data[i] > 0.0 ? grad_output.data[i] : 0.0;
        }
        break;
      case Activation::LeakyReLU:
        for (std::size_t i = 0; i < cache_.size(); ++i) {
          grad_in.data[i] =
              cache_.data[i] > 0.0 ? grad_output.data[i] : slope_ * grad_output.data[i];
        }
        break;
      case Activation::TanH:
        for (std::size_t i = 0; i < cache_.size(); ++i) {
          const double y = cache_.data[i];
          grad_in.data[i] = (1.0 - y * y) * grad_output.data[i];
        }
        break;
      case Activation::Sigmoid:
        for (std::size_t i = 0; i < cache_.size(); ++i) {
          const double y = cache_.data[i];
          grad_in.data[i] = y * (1.0 - y) * grad_output.data[i];
        }
        break;
    }
    return grad_in;
  }

 private:
  Activation kind_;
  double slope_;
  Tensor cache_;  // input for (Leaky)ReLU, output for TanH/Sigmoid
};

// --- reshape ------------------------------------------------------------------

/// [batch x channels*length] <-> [batch x channels x length]; no parameters.
class ReshapeLayer final : public Layer {
 public:
  ReshapeLayer(std::size_t channels, std::size_t length)
      : channels_(channels), length_(length) {}

  std::string describe() const override {
    return "reshape " + std::to_string(channels_) + " " + std::to_string(length_);
  }

  Tensor forward(const Tensor& input, bool /*training*/) override {
    const std::size_t b = input.batch();
    if (b == 0 || input.size() != b * channels_ * length_) {
      throw std::invalid_argument("reshape: expected " +
                                  std::to_string(channels_ * length_) +
                                  " values per sample, got " +
                                  input.shape_string());
    }
    input_shape_ = input.shape;
    return input.reshaped({b, channels_, length_});
  }

  Tensor backward(const Tensor& grad_output) override {
    return grad_output.reshaped(input_shape_);
  }

 private:
  std::size_t channels_, length_;
  std::vector<std::size_t> input_shape_;
};

// --- factory for snapshot loading ---------------------------------------------

inline std::unique_ptr<Layer> make_layer(std::string_view description) {
  const auto fields = split(trim(description), ' ');
  const std::string_view kind = fields.empty() ? "" : fields[0];
  const auto arg = [&](std::size_t i) {
    return static_cast<std::size_t>(parse_int(fields.at(i)));
  };
  if (kind == "dense" && fields.size() == 3) {
    return std::make_unique<DenseLayer>(arg(1), arg(2));
  }
  if (kind == "conv1d" && fields.size() == 6) {
    return std::make_unique<Conv1dLayer>(arg(1), arg(2), arg(3), arg(4), arg(5));
  }
  if (kind == "convt1d" && fields.size() == 6) {
    return std::make_unique<ConvT1dLayer>(arg(1), arg(2), arg(3), arg(4), arg(5));
  }
  if (kind == "batchnorm1d" && fields.size() == 4) {
    return std::make_unique<BatchNorm1dLayer>(arg(1), parse_double(fields[2]),
                                              parse_double(fields[3]));
  }
  if (kind == "relu" && fields.size() == 1) {
    return std::make_unique<ActivationLayer>(Activation::ReLU);
  }
  if (kind == "leakyrelu" && fields.size() == 2) {
    return std::make_unique<ActivationLayer>(Activation::LeakyReLU,
                                             parse_double(fields[1]));
  }
  if (kind == "tanh" && fields.size() == 1) {
    return std::make_unique<ActivationLayer>(Activation::TanH);
  }
  if (kind == "sigmoid" && fields.size() == 1) {
    return std::make_unique<ActivationLayer>(Activation::Sigmoid);
  }
  if (kind == "reshape" && fields.size() == 3) {
    return std::make_unique<ReshapeLayer>(arg(1), arg(2));
  }
  throw std::runtime_error("unknown layer description '" +
                           std::string(description) + "'");
}

}  // namespace mrs

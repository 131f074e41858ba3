#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mrs/layers.hpp"
#include "mrs/rng.hpp"
#include "mrs/tensor.hpp"

namespace mrs {

/// Ordered layer stack with single-slot forward caches. One backward pass is
/// allowed per forward pass, on the matching batch.
class Network {
 public:
  Network() = default;
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  template <typename L, typename... Args>
  Network& add(Args&&... args) {
    layers_.push_back(std::make_unique<L>(std::forward<Args>(args)...));
    return *this;
  }

  Network& add_layer(std::unique_ptr<Layer> layer) {
    layers_.push_back(std::move(layer));
    return *this;
  }

  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  std::vector<std::string> describe() const {
    std::vector<std::string> lines;
    lines.reserve(layers_.size());
    for (const auto& l : layers_) lines.push_back(l->describe());
    return lines;
  }

  Tensor forward(const Tensor& input, bool training = true) {
    Tensor x = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      try {
        x = layers_[i]->forward(x, training);
      } catch (const std::exception& e) {
        throw std::invalid_argument("layer " + std::to_string(i) + " (" +
                                    layers_[i]->describe() + "): " + e.what());
      }
    }
    forward_done_ = true;
    return x;
  }

  /// Accumulates parameter gradients and returns the gradient with respect to
  /// the network input, for chaining through a preceding network.
  Tensor backward(const Tensor& loss_grad) {
    if (!forward_done_) {
      throw std::logic_error("backward called without a preceding forward");
    }
    forward_done_ = false;
    Tensor g = loss_grad;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      try {
        g = layers_[i]->backward(g);
      } catch (const std::exception& e) {
        throw std::invalid_argument("layer " + std::to_string(i) + " (" +
                                    layers_[i]->describe() + "): " + e.what());
      }
    }
    return g;
  }

  void zero_grad() {
    for (const auto& l : layers_) l->zero_grad();
  }

  std::vector<ParamRef> parameters() const {
    std::vector<ParamRef> out;
    for (const auto& l : layers_) {
      for (const ParamRef& p : l->parameters()) out.push_back(p);
    }
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const ParamRef& p : parameters()) n += p.value->size();
    return n;
  }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  bool forward_done_ = false;
};

/// Weights ~ Normal(0, 0.02), biases 0, batch-norm scale 1 / shift 0;
/// deterministic draw order for a given seed.
inline void init_params(Network& net, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (const ParamRef& p : net.layer(i).parameters()) {
      switch (p.kind) {
        case ParamKind::Weight:
          for (double& v : *p.value) v = rng.normal(0.0, 0.02);
          break;
        case ParamKind::Bias:
        case ParamKind::Shift:
          std::fill(p.value->begin(), p.value->end(), 0.0);
          break;
        case ParamKind::Scale:
          std::fill(p.value->begin(), p.value->end(), 1.0);
          break;
      }
    }
    if (auto* bn = dynamic_cast<BatchNorm1dLayer*>(&net.layer(i))) {
      bn->reset_running_stats();
    }
  }
}

// --- SFNET1 snapshot format ---------------------------------------------------
// Text header: magic, layer count, one description line per layer, then a
// "data" separator. Binary body: per layer, per buffer (parameters then state
// buffers, in declaration order), a little-endian u64 length followed by that
// many little-endian IEEE-754 doubles.

namespace detail {

inline void write_u64_le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

inline std::uint64_t read_u64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("snapshot: truncated integer");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[i]) << (8 * i);
  return v;
}

inline void write_f64_le(std::ostream& out, double d) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof d);
  std::memcpy(&bits, &d, sizeof bits);
  write_u64_le(out, bits);
}

inline double read_f64_le(std::istream& in) {
  const std::uint64_t bits = read_u64_le(in);
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

inline std::vector<std::vector<double>*> all_buffers(Layer& layer) {
  std::vector<std::vector<double>*> bufs;
  for (const ParamRef& p : layer.parameters()) bufs.push_back(p.value);
  for (std::vector<double>* s : layer.state_buffers()) bufs.push_back(s);
  return bufs;
}

}  // namespace detail

inline constexpr const char* kNetworkMagic = "SFNET1";

inline void save_network(const Network& net, std::ostream& out) {
  out << kNetworkMagic << '\n' << net.size() << '\n';
  for (const std::string& line : net.describe()) out << line << '\n';
  out << "data\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    auto& layer = const_cast<Network&>(net).layer(i);
    for (std::vector<double>* buf : detail::all_buffers(layer)) {
      detail::write_u64_le(out, buf->size());
      for (double v : *buf) detail::write_f64_le(out, v);
    }
  }
}

inline void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_network(net, out);
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline Network load_network(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kNetworkMagic) {
    throw std::runtime_error("snapshot: bad magic, expected SFNET1");
  }
  if (!std::getline(in, line)) throw std::runtime_error("snapshot: missing layer count");
  const std::size_t n = static_cast<std::size_t>(parse_int(trim(line)));
  Network net;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("snapshot: missing layer line");
    net.add_layer(make_layer(line));
  }
  if (!std::getline(in, line) || trim(line) != "data") {
    throw std::runtime_error("snapshot: missing data separator");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::vector<double>* buf : detail::all_buffers(net.layer(i))) {
      const std::uint64_t len = detail::read_u64_le(in);
      if (len != buf->size()) {
        throw std::runtime_error("snapshot: buffer length mismatch in layer " +
                                 std::to_string(i));
      }
      for (double& v : *buf) v = detail::read_f64_le(in);
    }
  }
  return net;
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_network(in);
}

}  // namespace mrs

#include "vialsim/perception/cnn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace vialsim::perception {

std::string to_string(CropLabel label) {
  switch (label) {
    case CropLabel::NotInRack: return "not_in_rack";
    case CropLabel::InRackOccupied: return "in_rack_occupied";
    case CropLabel::InRackVacant: return "in_rack_vacant";
  }
  return "unknown";
}

std::vector<LayerInfo> layer_layout(const CnnShape& s) {
  std::vector<LayerInfo> layers = {
      {"conv1.weight", {s.k1, 1, 5, 5}},  {"conv1.bias", {s.k1}},
      {"conv2.weight", {s.k2, s.k1, 5, 5}}, {"conv2.bias", {s.k2}},
      {"fc1.weight", {s.fc1, s.flat()}},  {"fc1.bias", {s.fc1}},
      {"fc2.weight", {s.fc2, s.fc1}},     {"fc2.bias", {s.fc2}},
      {"fc3.weight", {2, s.fc2}},         {"fc3.bias", {2}},
  };
  std::size_t offset = 0;
  for (auto& l : layers) {
    l.count = std::accumulate(l.dims.begin(), l.dims.end(), std::size_t{1},
                              [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
    l.offset = offset;
    offset += l.count;
  }
  return layers;
}

void check_shape(const CnnShape& s) {
  if (s.input < 16 || s.input % 16 != 0) throw InvalidArgument("cnn: input size must be a positive multiple of 16");
  if (s.k1 <= 0 || s.k2 <= 0 || s.fc1 <= 0 || s.fc2 <= 0) throw InvalidArgument("cnn: layer widths must be > 0");
}

CnnWeights::CnnWeights(const CnnShape& s) : shape(s) {
  check_shape(s);
  const auto layers = layer_layout(s);
  params.assign(layers.back().offset + layers.back().count, 0.0f);
}

bool CnnWeights::finite() const {
  return std::all_of(params.begin(), params.end(), [](float p) { return std::isfinite(p); });
}

CnnWeights init_weights(const CnnShape& shape, RngStream& rng) {
  CnnWeights w(shape);
  for (const auto& l : layer_layout(shape)) {
    if (l.dims.size() == 1) continue;  // biases stay zero
    std::size_t fan_in = 1;
    for (std::size_t i = 1; i < l.dims.size(); ++i) fan_in *= static_cast<std::size_t>(l.dims[i]);
    const double sigma = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < l.count; ++i) w.params[l.offset + i] = static_cast<float>(rng.normal(0.0, sigma));
  }
  return w;
}

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

struct Offsets {
  std::size_t c1w, c1b, c2w, c2b, f1w, f1b, f2w, f2b, f3w, f3b;

  explicit Offsets(const CnnShape& s) {
    const auto l = layer_layout(s);
    c1w = l[0].offset; c1b = l[1].offset; c2w = l[2].offset; c2b = l[3].offset;
    f1w = l[4].offset; f1b = l[5].offset; f2w = l[6].offset; f2b = l[7].offset;
    f3w = l[8].offset; f3b = l[9].offset;
  }
};

template <typename T>
struct Net {
  const CnnShape& s;
  const T* p;
  Offsets off;

  std::vector<T> x, a1, p1, a2, p2;
  std::vector<int> i1, i2;  // pool argmax into a1 / a2
  Vec<T> h1, h2, z;

  Net(const CnnShape& shape, const T* params) : s(shape), p(params), off(shape) {}

  static T relu(T v) { return v > T(0) ? v : T(0); }

  void conv(const std::vector<T>& in, int cin, int n_in, const T* w, const T* b, int cout, int n_out,
            std::vector<T>& out) const {
    out.assign(static_cast<std::size_t>(cout) * n_out * n_out, T(0));
    for (int co = 0; co < cout; ++co) {
      for (int oy = 0; oy < n_out; ++oy) {
        for (int ox = 0; ox < n_out; ++ox) {
          T acc = b[co];
          for (int ci = 0; ci < cin; ++ci) {
            const T* wk = w + (static_cast<std::size_t>(co) * cin + ci) * 25;
            const T* plane = in.data() + static_cast<std::size_t>(ci) * n_in * n_in;
            for (int ky = 0; ky < 5; ++ky) {
              const int iy = 2 * oy + ky - 2;
              if (iy < 0 || iy >= n_in) continue;
              for (int kx = 0; kx < 5; ++kx) {
                const int ix = 2 * ox + kx - 2;
                if (ix < 0 || ix >= n_in) continue;
                acc += wk[ky * 5 + kx] * plane[iy * n_in + ix];
              }
            }
          }
          out[(static_cast<std::size_t>(co) * n_out + oy) * n_out + ox] = acc;
        }
      }
    }
  }

  void conv_backward(const std::vector<T>& in, int cin, int n_in, const T* w, const std::vector<T>& dout, int cout,
                     int n_out, T* gw, T* gb, std::vector<T>* din) const {
    if (din != nullptr) din->assign(in.size(), T(0));
    for (int co = 0; co < cout; ++co) {
      for (int oy = 0; oy < n_out; ++oy) {
        for (int ox = 0; ox < n_out; ++ox) {
          const T d = dout[(static_cast<std::size_t>(co) * n_out + oy) * n_out + ox];
          if (d == T(0)) continue;
          gb[co] += d;
          for (int ci = 0; ci < cin; ++ci) {
            const std::size_t wbase = (static_cast<std::size_t>(co) * cin + ci) * 25;
            const std::size_t pbase = static_cast<std::size_t>(ci) * n_in * n_in;
            for (int ky = 0; ky < 5; ++ky) {
              const int iy = 2 * oy + ky - 2;
              if (iy < 0 || iy >= n_in) continue;
              for (int kx = 0; kx < 5; ++kx) {
                const int ix = 2 * ox + kx - 2;
                if (ix < 0 || ix >= n_in) continue;
                gw[wbase + ky * 5 + kx] += d * in[pbase + iy * n_in + ix];
                if (din != nullptr) (*din)[pbase + iy * n_in + ix] += d * w[wbase + ky * 5 + kx];
              }
            }
          }
        }
      }
    }
  }

  // relu then 2x2 max pool
  static void pool(const std::vector<T>& a, int c, int n, std::vector<T>& out, std::vector<int>& idx) {
    const int m = n / 2;
    out.assign(static_cast<std::size_t>(c) * m * m, T(0));
    idx.assign(out.size(), 0);
    for (int ch = 0; ch < c; ++ch) {
      for (int y = 0; y < m; ++y) {
        for (int x = 0; x < m; ++x) {
          int best = (ch * n + 2 * y) * n + 2 * x;
          T best_v = relu(a[best]);
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const int k = (ch * n + 2 * y + dy) * n + 2 * x + dx;
              if (relu(a[k]) > best_v) {
                best_v = relu(a[k]);
                best = k;
              }
            }
          }
          const std::size_t o = (static_cast<std::size_t>(ch) * m + y) * m + x;
          out[o] = best_v;
          idx[o] = best;
        }
      }
    }
  }

  void forward(const float* input) {
    const int n = s.input;
    x.assign(input, input + static_cast<std::size_t>(n) * n);
    conv(x, 1, n, p + off.c1w, p + off.c1b, s.k1, s.conv1_out(), a1);
    pool(a1, s.k1, s.conv1_out(), p1, i1);
    conv(p1, s.k1, s.pool1_out(), p + off.c2w, p + off.c2b, s.k2, s.conv2_out(), a2);
    pool(a2, s.k2, s.conv2_out(), p2, i2);

    const Eigen::Map<const Vec<T>> flat(p2.data(), s.flat());
    const Eigen::Map<const RowMat<T>> w1(p + off.f1w, s.fc1, s.flat());
    const Eigen::Map<const Vec<T>> b1(p + off.f1b, s.fc1);
    h1 = (w1 * flat + b1).unaryExpr([](T v) { return relu(v); });
    const Eigen::Map<const RowMat<T>> w2(p + off.f2w, s.fc2, s.fc1);
    const Eigen::Map<const Vec<T>> b2(p + off.f2b, s.fc2);
    h2 = (w2 * h1 + b2).unaryExpr([](T v) { return relu(v); });
    const Eigen::Map<const RowMat<T>> w3(p + off.f3w, 2, s.fc2);
    const Eigen::Map<const Vec<T>> b3(p + off.f3b, 2);
    z = w3 * h2 + b3;
  }

  // Accumulates dLoss/dparams into g given dLoss/dz.
  void backward(T dz0, T dz1, T* g) const {
    Vec<T> dz(2);
    dz << dz0, dz1;
    Eigen::Map<RowMat<T>> gw3(g + off.f3w, 2, s.fc2);
    Eigen::Map<Vec<T>> gb3(g + off.f3b, 2);
    gw3.noalias() += dz * h2.transpose();
    gb3 += dz;
    const Eigen::Map<const RowMat<T>> w3(p + off.f3w, 2, s.fc2);
    Vec<T> d2 = w3.transpose() * dz;
    for (int i = 0; i < d2.size(); ++i) if (!(h2[i] > T(0))) d2[i] = T(0);

    Eigen::Map<RowMat<T>> gw2(g + off.f2w, s.fc2, s.fc1);
    Eigen::Map<Vec<T>> gb2(g + off.f2b, s.fc2);
    gw2.noalias() += d2 * h1.transpose();
    gb2 += d2;
    const Eigen::Map<const RowMat<T>> w2(p + off.f2w, s.fc2, s.fc1);
    Vec<T> d1 = w2.transpose() * d2;
    for (int i = 0; i < d1.size(); ++i) if (!(h1[i] > T(0))) d1[i] = T(0);

    const Eigen::Map<const Vec<T>> flat(p2.data(), s.flat());
    Eigen::Map<RowMat<T>> gw1(g + off.f1w, s.fc1, s.flat());
    Eigen::Map<Vec<T>> gb1(g + off.f1b, s.fc1);
    gw1.noalias() += d1 * flat.transpose();
    gb1 += d1;
    const Eigen::Map<const RowMat<T>> w1(p + off.f1w, s.fc1, s.flat());
    const Vec<T> dflat = w1.transpose() * d1;

    std::vector<T> da2(a2.size(), T(0));
    for (std::size_t i = 0; i < i2.size(); ++i) {
      if (a2[i2[i]] > T(0)) da2[i2[i]] += dflat[static_cast<Eigen::Index>(i)];
    }
    std::vector<T> dp1;
    conv_backward(p1, s.k1, s.pool1_out(), p + off.c2w, da2, s.k2, s.conv2_out(), g + off.c2w, g + off.c2b, &dp1);

    std::vector<T> da1(a1.size(), T(0));
    for (std::size_t i = 0; i < i1.size(); ++i) {
      if (a1[i1[i]] > T(0)) da1[i1[i]] += dp1[i];
    }
    conv_backward(x, 1, s.input, p + off.c1w, da1, s.k1, s.conv1_out(), g + off.c1w, g + off.c1b, nullptr);
  }
};

template <typename T>
T sigmoid(T z) {
  return z >= T(0) ? T(1) / (T(1) + std::exp(-z)) : std::exp(z) / (T(1) + std::exp(z));
}

// Numerically stable BCE on a logit.
template <typename T>
T bce(T z, T y) {
  return std::max(z, T(0)) - z * y + std::log1p(std::exp(-std::abs(z)));
}

void check_crop(const Crop& crop, const CnnShape& shape) {
  if (crop.size != shape.input || crop.data.size() != static_cast<std::size_t>(shape.input) * shape.input) {
    throw InvalidArgument("cnn: crop is " + std::to_string(crop.size) + "x" + std::to_string(crop.size) +
                          ", network expects " + std::to_string(shape.input) + "x" + std::to_string(shape.input));
  }
}

template <typename T>
T loss_impl(const Crop& crop, CropLabel label, const CnnShape& shape, const T* params, T* grad) {
  Net<T> net(shape, params);
  net.forward(crop.data.data());
  const bool in_rack = label != CropLabel::NotInRack;
  const T y1 = in_rack ? T(1) : T(0);
  const T y2 = label == CropLabel::InRackOccupied ? T(1) : T(0);
  T loss = bce(net.z[0], y1);
  if (in_rack) loss += bce(net.z[1], y2);
  if (grad != nullptr) {
    const T dz0 = sigmoid(net.z[0]) - y1;
    const T dz1 = in_rack ? sigmoid(net.z[1]) - y2 : T(0);
    net.backward(dz0, dz1, grad);
  }
  return loss;
}

}  // namespace

CnnOutput cnn_forward(const Crop& crop, const CnnWeights& weights) {
  check_crop(crop, weights.shape);
  Net<float> net(weights.shape, weights.params.data());
  net.forward(crop.data.data());
  return {static_cast<double>(sigmoid(net.z[0])), static_cast<double>(sigmoid(net.z[1]))};
}

double cnn_loss(const Crop& crop, CropLabel label, const CnnWeights& weights, std::vector<float>* grad) {
  check_crop(crop, weights.shape);
  if (grad != nullptr) grad->assign(weights.params.size(), 0.0f);
  return loss_impl<float>(crop, label, weights.shape, weights.params.data(), grad ? grad->data() : nullptr);
}

double cnn_loss(const Crop& crop, CropLabel label, const CnnShape& shape, const std::vector<double>& params,
                std::vector<double>* grad) {
  check_crop(crop, shape);
  const auto layers = layer_layout(shape);
  if (params.size() != layers.back().offset + layers.back().count) {
    throw InvalidArgument("cnn: parameter vector does not match the shape");
  }
  if (grad != nullptr) grad->assign(params.size(), 0.0);
  return loss_impl<double>(crop, label, shape, params.data(), grad ? grad->data() : nullptr);
}

CnnWeights cnn_train(const std::vector<LabeledCrop>& dataset, const TrainParams& tp, RngStream& rng,
                     const CnnShape& shape, TrainReport* report) {
  if (dataset.empty()) throw InvalidArgument("cnn_train: empty dataset");
  if (tp.batch <= 0 || tp.epochs <= 0) throw InvalidArgument("cnn_train: epochs and batch must be > 0");
  for (const auto& s : dataset) check_crop(s.crop, shape);

  CnnWeights w = init_weights(shape, rng);
  const std::size_t n_params = w.params.size();
  std::vector<float> velocity(n_params, 0.0f);
  std::vector<float> grad(n_params);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < tp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(tp.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(tp.batch));
      std::fill(grad.begin(), grad.end(), 0.0f);
      for (std::size_t k = start; k < end; ++k) {
        const auto& sample = dataset[order[k]];
        epoch_loss += loss_impl<float>(sample.crop, sample.label, w.shape, w.params.data(), grad.data());
      }
      const float scale = 1.0f / static_cast<float>(end - start);
      const auto lr = static_cast<float>(tp.learning_rate);
      const auto mu = static_cast<float>(tp.momentum);
      for (std::size_t i = 0; i < n_params; ++i) {
        velocity[i] = mu * velocity[i] - lr * grad[i] * scale;
        w.params[i] += velocity[i];
      }
    }
    epoch_loss /= static_cast<double>(dataset.size());
    if (!std::isfinite(epoch_loss) || !w.finite()) {
      throw std::runtime_error("cnn_train: loss diverged at epoch " + std::to_string(epoch + 1));
    }
    if (report != nullptr) report->epoch_loss.push_back(epoch_loss);
  }
  return w;
}

CropLabel classify(const CnnOutput& out, double theta_rack, double theta_occ) {
  if (out.p_in_rack < theta_rack) return CropLabel::NotInRack;
  return out.p_occupied > theta_occ ? CropLabel::InRackOccupied : CropLabel::InRackVacant;
}

double accuracy(const std::vector<LabeledCrop>& dataset, const CnnWeights& weights, double theta_rack,
                double theta_occ) {
  if (dataset.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : dataset) {
    if (classify(cnn_forward(s.crop, weights), theta_rack, theta_occ) == s.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

namespace {

constexpr const char* kMagic = "VIALCNN1\n";

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

std::string encode_weights(const CnnWeights& weights) {
  std::ostringstream out;
  out << kMagic << "input " << weights.shape.input << "\n";
  for (const auto& l : layer_layout(weights.shape)) {
    out << l.name;
    for (int d : l.dims) out << ' ' << d;
    out << '\n';
  }
  out << "end\n";
  std::string bytes = out.str();
  for (float f : weights.params) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    u = to_le(u);
    bytes.append(reinterpret_cast<const char*>(&u), 4);
  }
  return bytes;
}

CnnWeights decode_weights(const std::string& bytes) {
  const std::string magic = kMagic;
  if (bytes.compare(0, magic.size(), magic) != 0) throw std::runtime_error("weights: bad magic");
  std::size_t pos = magic.size();
  std::vector<std::pair<std::string, std::vector<int>>> header;
  int input = 0;
  while (true) {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw std::runtime_error("weights: truncated header");
    std::istringstream line(bytes.substr(pos, nl - pos));
    pos = nl + 1;
    std::string name;
    line >> name;
    if (name == "end") break;
    std::vector<int> dims;
    int d;
    while (line >> d) dims.push_back(d);
    if (name == "input") {
      if (dims.size() != 1) throw std::runtime_error("weights: malformed input line");
      input = dims[0];
    } else {
      header.emplace_back(name, dims);
    }
  }
  if (header.size() != 10) throw std::runtime_error("weights: expected 10 layers");

  CnnShape shape;
  try {
    shape.input = input;
    shape.k1 = header.at(0).second.at(0);
    shape.k2 = header.at(2).second.at(0);
    shape.fc1 = header.at(4).second.at(0);
    shape.fc2 = header.at(6).second.at(0);
    check_shape(shape);
  } catch (const std::exception&) {
    throw std::runtime_error("weights: inconsistent layer shapes");
  }
  const auto layers = layer_layout(shape);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].name != header[i].first || layers[i].dims != header[i].second) {
      throw std::runtime_error("weights: layer '" + header[i].first + "' does not match the architecture");
    }
  }
  CnnWeights w(shape);
  if (bytes.size() - pos != w.params.size() * 4) throw std::runtime_error("weights: payload size mismatch");
  for (std::size_t i = 0; i < w.params.size(); ++i) {
    std::uint32_t u;
    std::memcpy(&u, bytes.data() + pos + 4 * i, 4);
    u = to_le(u);
    std::memcpy(&w.params[i], &u, 4);
  }
  return w;
}

void save_weights(const std::string& path, const CnnWeights& weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write weights file: " + path);
  const std::string bytes = encode_weights(weights);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing weights file: " + path);
}

CnnWeights load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weights file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_weights(ss.str());
}

}  // namespace vialsim::perception

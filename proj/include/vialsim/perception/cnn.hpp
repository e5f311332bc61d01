#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vialsim/core/rng.hpp"
#include "vialsim/perception/crop.hpp"

namespace vialsim::perception {

enum class CropLabel { NotInRack, InRackOccupied, InRackVacant };

std::string to_string(CropLabel label);

struct LabeledCrop {
  Crop crop;
  CropLabel label = CropLabel::NotInRack;
};

/// conv(5x5, s2) -> relu -> pool 2 -> conv(5x5, s2) -> relu -> pool 2 -> fc -> fc -> fc(2)
struct CnnShape {
  int input = 32;
  int k1 = 8;
  int k2 = 16;
  int fc1 = 512;
  int fc2 = 128;

  int conv1_out() const { return input / 2; }
  int pool1_out() const { return input / 4; }
  int conv2_out() const { return input / 8; }
  int pool2_out() const { return input / 16; }
  int flat() const { return k2 * pool2_out() * pool2_out(); }

  bool operator==(const CnnShape&) const = default;
};

struct LayerInfo {
  std::string name;
  std::vector<int> dims;
  std::size_t offset = 0;
  std::size_t count = 0;
};

/// Parameter layout in declaration order: conv1.weight, conv1.bias, conv2.weight,
/// conv2.bias, fc1.weight, fc1.bias, fc2.weight, fc2.bias, fc3.weight, fc3.bias.
std::vector<LayerInfo> layer_layout(const CnnShape& shape);

/// Throws InvalidArgument when the input size does not survive the two
/// stride-2 convolutions and pools.
void check_shape(const CnnShape& shape);

struct CnnWeights {
  CnnShape shape;
  std::vector<float> params;  // flat, layer_layout order

  CnnWeights() : CnnWeights(CnnShape{}) {}
  explicit CnnWeights(const CnnShape& s);  // all zero

  bool finite() const;
  bool operator==(const CnnWeights&) const = default;
};

/// He-normal weights, zero biases.
CnnWeights init_weights(const CnnShape& shape, RngStream& rng);

struct CnnOutput {
  double p_in_rack = 0.5;
  double p_occupied = 0.5;
};

/// Throws InvalidArgument when the crop size differs from the network input.
CnnOutput cnn_forward(const Crop& crop, const CnnWeights& weights);

/// Summed binary cross-entropy of one sample. Head 2 (occupancy) is masked
/// out for NotInRack. When `grad` is non-null it receives dLoss/dparams
/// (resized to the parameter count and overwritten).
double cnn_loss(const Crop& crop, CropLabel label, const CnnWeights& weights, std::vector<float>* grad);

/// Same computation in double precision over an explicit parameter vector,
/// for gradient checking.
double cnn_loss(const Crop& crop, CropLabel label, const CnnShape& shape, const std::vector<double>& params,
                std::vector<double>* grad);

struct TrainParams {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 20;
  int batch = 32;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean per-sample loss in each epoch
};

/// Mini-batch SGD with momentum from He-initialised weights. Seeded and
/// reproducible. Throws InvalidArgument on an empty dataset and
/// std::runtime_error naming the epoch if the loss becomes non-finite.
CnnWeights cnn_train(const std::vector<LabeledCrop>& dataset, const TrainParams& params, RngStream& rng,
                     const CnnShape& shape = {}, TrainReport* report = nullptr);

/// Three-way decision from the two heads.
CropLabel classify(const CnnOutput& out, double theta_rack = 0.5, double theta_occ = 0.5);

/// Fraction of samples whose three-way decision matches the label.
double accuracy(const std::vector<LabeledCrop>& dataset, const CnnWeights& weights, double theta_rack = 0.5,
                double theta_occ = 0.5);

/// "VIALCNN1\n", an ASCII header of layer shapes terminated by "end\n", then
/// little-endian float32 parameters in declaration order.
void save_weights(const std::string& path, const CnnWeights& weights);
CnnWeights load_weights(const std::string& path);
std::string encode_weights(const CnnWeights& weights);
CnnWeights decode_weights(const std::string& bytes);

}  // namespace vialsim::perception

#pragma once

// Classical baseline: in -> h1 (ReLU) -> h2 (ReLU) -> 1, with tanh on the
// output so the score lives in [-1, 1] like the quantum readout.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frqinet/frqi.hpp"
#include "frqinet/mnist.hpp"
#include "frqinet/parallel.hpp"
#include "frqinet/trainer.hpp"

namespace frqinet {

struct DenseNet {
  Eigen::MatrixXd w1;  // h1 x in
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // h2 x h1
  Eigen::VectorXd b2;
  Eigen::RowVectorXd w3;  // 1 x h2
  double b3 = 0.0;

  int inputs() const { return static_cast<int>(w1.cols()); }
  int num_params() const;

  static DenseNet zeros(int in, int h1, int h2);
  /// Uniform in +-1/sqrt(fan_in) for every weight and bias.
  static DenseNet random(int in, int h1, int h2, std::uint64_t seed);
};

Eigen::VectorXd image_features(const BinaryImage& image);

double mlp_forward(const DenseNet& net, const Eigen::VectorXd& x);
double mlp_forward(const DenseNet& net, const BinaryImage& image);

/// Gradient of the hinge loss 1 - y * mlp_forward(x), same layout as the net.
DenseNet mlp_loss_grad(const DenseNet& net, const Eigen::VectorXd& x, int label, double* loss = nullptr);

/// Flattened parameters: w1, b1, w2, b2, w3, b3 (column-major blocks).
Eigen::VectorXd flatten(const DenseNet& net);
DenseNet unflatten(const Eigen::VectorXd& flat, int in, int h1, int h2);

struct BaselineSample {
  Eigen::VectorXd x;
  int label = 1;
};

std::vector<BaselineSample> baseline_samples(const std::vector<LabeledImage>& split);

EvalResult mlp_evaluate(const DenseNet& net, std::span<const BaselineSample> data);

struct MlpTrainResult {
  DenseNet net;
  std::vector<EpochMetrics> history;
};

/// Same protocol as the quantum trainer: per-epoch seeded shuffle,
/// mean mini-batch gradient in sample order, plain SGD.
MlpTrainResult mlp_train(DenseNet net, std::span<const BaselineSample> train,
                         std::span<const BaselineSample> val, const TrainOptions& opts, int epochs,
                         std::uint64_t seed, const WorkerPool& pool,
                         const std::function<void(const EpochMetrics&)>& on_epoch = {});

/// Text: `dense_net in h1 h2`, then one line per block of 17-digit reals.
std::string dense_net_to_text(const DenseNet& net);
DenseNet dense_net_from_text(const std::string& text);

}  // namespace frqinet

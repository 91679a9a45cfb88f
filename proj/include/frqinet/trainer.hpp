#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "frqinet/gradients.hpp"
#include "frqinet/parallel.hpp"
#include "frqinet/qnn.hpp"

namespace frqinet {

struct EncodedSample {
  Statevector data;  // encoded image, no readout qubit
  int label = 1;     // +1 or -1
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

struct TrainState {
  ParamVector params;
  int epoch = 0;
  std::uint64_t rng_seed = 0;
  std::vector<EpochMetrics> history;
};

enum class GradMethod {
  BackwardSweep,   // backward_shift_grad
  ParameterShift,  // parameter_shift_grad, two circuit runs per occurrence
};

struct TrainOptions {
  double lr = 0.02;
  int batch = 32;
  GradMethod method = GradMethod::BackwardSweep;
};

/// Linear form, no clamping: 1 - y * f, in [0, 2] for |f| <= 1.
double hinge_loss(double expectation, int label);

/// Deterministic permutation of [0, n) for a given (seed, epoch).
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed, int epoch);

struct EvalResult {
  double accuracy = 0.0;
  double mean_loss = 0.0;
};

EvalResult evaluate(std::span<const double> params, const QnnModel& model,
                    std::span<const EncodedSample> dataset, const WorkerPool& pool);

/// One pass of mini-batch SGD on the hinge loss, then metrics on the full
/// train set (and `val`, when non-empty) at the updated parameters.
/// Per-sample gradients are reduced in sample order, so thread count never
/// changes the result.
TrainState train_epoch(TrainState state, std::span<const EncodedSample> train,
                       std::span<const EncodedSample> val, const QnnModel& model,
                       const TrainOptions& opts, const WorkerPool& pool);

/// `epochs` calls of train_epoch; `on_epoch` sees each new history row.
TrainState train(TrainState state, std::span<const EncodedSample> train,
                 std::span<const EncodedSample> val, const QnnModel& model,
                 const TrainOptions& opts, int epochs, const WorkerPool& pool,
                 const std::function<void(const EpochMetrics&)>& on_epoch = {});

/// `epoch,train_loss,train_acc,val_acc`, six fractional digits.
std::string metrics_csv(const std::vector<EpochMetrics>& history);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& history);

}  // namespace frqinet

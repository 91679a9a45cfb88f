#include "frqinet/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace frqinet {

double hinge_loss(double expectation, int label) { return 1.0 - label * expectation; }

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed, int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

EvalResult evaluate(std::span<const double> params, const QnnModel& model,
                    std::span<const EncodedSample> dataset, const WorkerPool& pool) {
  if (dataset.empty()) throw std::invalid_argument("evaluate: empty dataset");
  std::vector<double> f(dataset.size());
  pool.parallel_for(dataset.size(), [&](std::size_t i) {
    f[i] = forward(dataset[i].data, model, params);
  });
  EvalResult r;
  std::size_t correct = 0;
  double loss = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    correct += predict(f[i]) == dataset[i].label;
    loss += hinge_loss(f[i], dataset[i].label);
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
  r.mean_loss = loss / static_cast<double>(dataset.size());
  return r;
}

namespace {

Gradient sample_grad(const EncodedSample& s, const QnnModel& model, std::span<const double> params,
                     GradMethod method) {
  Gradient g = method == GradMethod::BackwardSweep
                   ? backward_shift_grad(s.data, model, params).grad
                   : parameter_shift_grad(s.data, model, params);
  // d(1 - y f)/dtheta = -y df/dtheta
  for (auto& v : g) v *= -s.label;
  return g;
}

}  // namespace

TrainState train_epoch(TrainState state, std::span<const EncodedSample> train,
                       std::span<const EncodedSample> val, const QnnModel& model,
                       const TrainOptions& opts, const WorkerPool& pool) {
  if (train.empty()) throw std::invalid_argument("train_epoch: empty dataset");
  if (!(opts.lr >= 0.0)) throw std::invalid_argument("train_epoch: lr must be non-negative");
  if (opts.batch < 1) throw std::invalid_argument("train_epoch: batch must be >= 1");
  if (state.params.size() != static_cast<std::size_t>(model.num_params())) {
    throw std::invalid_argument("train_epoch: parameter count mismatch");
  }

  const auto order = shuffled_order(train.size(), state.rng_seed, state.epoch);
  const auto batch = static_cast<std::size_t>(opts.batch);
  std::vector<Gradient> grads(batch);
  Gradient mean(state.params.size());

  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t count = std::min(batch, order.size() - start);
    pool.parallel_for(count, [&](std::size_t j) {
      grads[j] = sample_grad(train[order[start + j]], model, state.params, opts.method);
    });
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t s = 0; s < mean.size(); ++s) mean[s] += grads[j][s];
    }
    const double step = opts.lr / static_cast<double>(count);
    for (std::size_t s = 0; s < mean.size(); ++s) state.params[s] -= step * mean[s];
  }

  ++state.epoch;
  EpochMetrics m;
  m.epoch = state.epoch;
  const EvalResult tr = evaluate(state.params, model, train, pool);
  m.train_loss = tr.mean_loss;
  m.train_acc = tr.accuracy;
  m.val_acc = val.empty() ? 0.0 : evaluate(state.params, model, val, pool).accuracy;
  state.history.push_back(m);
  return state;
}

TrainState train(TrainState state, std::span<const EncodedSample> train_set,
                 std::span<const EncodedSample> val, const QnnModel& model,
                 const TrainOptions& opts, int epochs, const WorkerPool& pool,
                 const std::function<void(const EpochMetrics&)>& on_epoch) {
  for (int e = 0; e < epochs; ++e) {
    state = train_epoch(std::move(state), train_set, val, model, opts, pool);
    if (on_epoch) on_epoch(state.history.back());
  }
  return state;
}

std::string metrics_csv(const std::vector<EpochMetrics>& history) {
  std::string out = "epoch,train_loss,train_acc,val_acc\n";
  char buf[128];
  for (const auto& m : history) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f\n", m.epoch, m.train_loss, m.train_acc,
                  m.val_acc);
    out += buf;
  }
  return out;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& history) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << metrics_csv(history);
}

}  // namespace frqinet

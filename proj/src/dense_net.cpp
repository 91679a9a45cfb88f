#include "frqinet/dense_net.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace frqinet {

int DenseNet::num_params() const {
  return static_cast<int>(w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + 1);
}

DenseNet DenseNet::zeros(int in, int h1, int h2) {
  if (in < 1 || h1 < 1 || h2 < 1) throw std::invalid_argument("DenseNet: sizes must be positive");
  DenseNet n;
  n.w1 = Eigen::MatrixXd::Zero(h1, in);
  n.b1 = Eigen::VectorXd::Zero(h1);
  n.w2 = Eigen::MatrixXd::Zero(h2, h1);
  n.b2 = Eigen::VectorXd::Zero(h2);
  n.w3 = Eigen::RowVectorXd::Zero(h2);
  n.b3 = 0.0;
  return n;
}

DenseNet DenseNet::random(int in, int h1, int h2, std::uint64_t seed) {
  DenseNet n = zeros(in, h1, h2);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](auto& m, int fan_in) {
    std::uniform_real_distribution<double> d(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  };
  fill(n.w1, in);
  fill(n.b1, in);
  fill(n.w2, h1);
  fill(n.b2, h1);
  fill(n.w3, h2);
  std::uniform_real_distribution<double> d3(-1.0 / std::sqrt(h2), 1.0 / std::sqrt(h2));
  n.b3 = d3(rng);
  return n;
}

Eigen::VectorXd image_features(const BinaryImage& image) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(image.pixel_count()));
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    x(static_cast<Eigen::Index>(i)) = image.pixels()[i];
  }
  return x;
}

double mlp_forward(const DenseNet& net, const Eigen::VectorXd& x) {
  if (x.size() != net.w1.cols()) throw std::invalid_argument("mlp_forward: input size mismatch");
  const Eigen::VectorXd a1 = (net.w1 * x + net.b1).cwiseMax(0.0);
  const Eigen::VectorXd a2 = (net.w2 * a1 + net.b2).cwiseMax(0.0);
  return std::tanh(net.w3.dot(a2) + net.b3);
}

double mlp_forward(const DenseNet& net, const BinaryImage& image) {
  return mlp_forward(net, image_features(image));
}

DenseNet mlp_loss_grad(const DenseNet& net, const Eigen::VectorXd& x, int label, double* loss) {
  if (x.size() != net.w1.cols()) throw std::invalid_argument("mlp_loss_grad: input size mismatch");
  const Eigen::VectorXd z1 = net.w1 * x + net.b1;
  const Eigen::VectorXd a1 = z1.cwiseMax(0.0);
  const Eigen::VectorXd z2 = net.w2 * a1 + net.b2;
  const Eigen::VectorXd a2 = z2.cwiseMax(0.0);
  const double out = std::tanh(net.w3.dot(a2) + net.b3);
  if (loss) *loss = hinge_loss(out, label);

  DenseNet g;
  const double dz3 = -label * (1.0 - out * out);
  g.w3 = dz3 * a2.transpose();
  g.b3 = dz3;
  const Eigen::VectorXd dz2 =
      (net.w3.transpose() * dz3).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  g.w2 = dz2 * a1.transpose();
  g.b2 = dz2;
  const Eigen::VectorXd dz1 =
      (net.w2.transpose() * dz2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  g.w1 = dz1 * x.transpose();
  g.b1 = dz1;
  return g;
}

Eigen::VectorXd flatten(const DenseNet& n) {
  Eigen::VectorXd f(n.num_params());
  Eigen::Index o = 0;
  auto put = [&](const auto& m) {
    f.segment(o, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    o += m.size();
  };
  put(n.w1);
  put(n.b1);
  put(n.w2);
  put(n.b2);
  put(n.w3);
  f(o) = n.b3;
  return f;
}

DenseNet unflatten(const Eigen::VectorXd& flat, int in, int h1, int h2) {
  DenseNet n = DenseNet::zeros(in, h1, h2);
  if (flat.size() != n.num_params()) throw std::invalid_argument("unflatten: size mismatch");
  Eigen::Index o = 0;
  auto get = [&](auto& m) {
    Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) = flat.segment(o, m.size());
    o += m.size();
  };
  get(n.w1);
  get(n.b1);
  get(n.w2);
  get(n.b2);
  get(n.w3);
  n.b3 = flat(o);
  return n;
}

std::vector<BaselineSample> baseline_samples(const std::vector<LabeledImage>& split) {
  std::vector<BaselineSample> out;
  out.reserve(split.size());
  for (const auto& s : split) out.push_back({image_features(s.image), s.label});
  return out;
}

EvalResult mlp_evaluate(const DenseNet& net, std::span<const BaselineSample> data) {
  if (data.empty()) throw std::invalid_argument("mlp_evaluate: empty dataset");
  std::size_t correct = 0;
  double loss = 0.0;
  for (const auto& s : data) {
    const double f = mlp_forward(net, s.x);
    correct += predict(f) == s.label;
    loss += hinge_loss(f, s.label);
  }
  const auto n = static_cast<double>(data.size());
  return {static_cast<double>(correct) / n, loss / n};
}

MlpTrainResult mlp_train(DenseNet net, std::span<const BaselineSample> train,
                         std::span<const BaselineSample> val, const TrainOptions& opts, int epochs,
                         std::uint64_t seed, const WorkerPool& pool,
                         const std::function<void(const EpochMetrics&)>& on_epoch) {
  if (train.empty()) throw std::invalid_argument("mlp_train: empty dataset");
  if (!(opts.lr >= 0.0) || opts.batch < 1) throw std::invalid_argument("mlp_train: bad options");
  const int in = net.inputs(), h1 = static_cast<int>(net.w1.rows()),
            h2 = static_cast<int>(net.w2.rows());
  const auto batch = static_cast<std::size_t>(opts.batch);
  std::vector<Eigen::VectorXd> grads(batch);
  MlpTrainResult result;

  for (int e = 0; e < epochs; ++e) {
    const auto order = shuffled_order(train.size(), seed, e);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      pool.parallel_for(count, [&](std::size_t j) {
        const auto& s = train[order[start + j]];
        grads[j] = flatten(mlp_loss_grad(net, s.x, s.label));
      });
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(net.num_params());
      for (std::size_t j = 0; j < count; ++j) mean += grads[j];
      mean /= static_cast<double>(count);
      net = unflatten(flatten(net) - opts.lr * mean, in, h1, h2);
    }
    EpochMetrics m;
    m.epoch = e + 1;
    const EvalResult tr = mlp_evaluate(net, train);
    m.train_loss = tr.mean_loss;
    m.train_acc = tr.accuracy;
    m.val_acc = val.empty() ? 0.0 : mlp_evaluate(net, val).accuracy;
    result.history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  result.net = std::move(net);
  return result;
}

std::string dense_net_to_text(const DenseNet& net) {
  std::ostringstream os;
  os << "dense_net " << net.inputs() << ' ' << net.w1.rows() << ' ' << net.w2.rows() << '\n';
  const Eigen::VectorXd f = flatten(net);
  char buf[40];
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", f(i));
    os << buf << '\n';
  }
  return os.str();
}

DenseNet dense_net_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  int in = 0, h1 = 0, h2 = 0;
  if (!(is >> tag >> in >> h1 >> h2) || tag != "dense_net") {
    throw std::invalid_argument("dense net file: bad header");
  }
  DenseNet shape = DenseNet::zeros(in, h1, h2);
  Eigen::VectorXd f(shape.num_params());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (!(is >> f(i))) throw std::invalid_argument("dense net file: truncated");
  }
  return unflatten(f, in, h1, h2);
}

}  // namespace frqinet

#include "reprobench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"

namespace reprobench {

namespace {

// Stable log(1 + exp(-|z|)).
inline double softplus_neg_abs(double z) { return std::log1p(std::exp(-std::abs(z))); }

inline double sigmoid(double z) {
  if (z >= 0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

MlpWeights mlp_init(std::uint64_t n_items, std::uint64_t hidden_dim, std::uint64_t seed) {
  auto eng = rng::make_engine(seed);
  MlpWeights w;
  w.w1.resize(hidden_dim, n_items);
  w.b1 = Eigen::VectorXd::Zero(hidden_dim);
  w.w2.resize(n_items, hidden_dim);
  w.b2 = Eigen::VectorXd::Zero(n_items);
  const double s1 = std::sqrt(2.0 / static_cast<double>(n_items));
  const double s2 = std::sqrt(2.0 / static_cast<double>(hidden_dim));
  for (Eigen::Index j = 0; j < w.w1.cols(); ++j)
    for (Eigen::Index i = 0; i < w.w1.rows(); ++i) w.w1(i, j) = s1 * rng::normal(eng);
  for (Eigen::Index j = 0; j < w.w2.cols(); ++j)
    for (Eigen::Index i = 0; i < w.w2.rows(); ++i) w.w2(i, j) = s2 * rng::normal(eng);
  return w;
}

std::pair<double, MlpWeights> mlp_loss_and_grad(const MlpWeights& w, const MlpBatch& batch) {
  const std::size_t batch_size = batch.pairs.size();
  if (batch_size == 0) throw DataError("empty batch");
  const auto n_items = static_cast<Eigen::Index>(w.n_items());
  const auto hidden = static_cast<Eigen::Index>(w.hidden_dim());

  if (!w.w1.allFinite() || !w.b1.allFinite() || !w.w2.allFinite() || !w.b2.allFinite())
    throw DataError("non-finite weights");

  MlpWeights grad;
  grad.w1 = Eigen::MatrixXd::Zero(hidden, n_items);
  grad.b1 = Eigen::VectorXd::Zero(hidden);
  grad.w2 = Eigen::MatrixXd::Zero(n_items, hidden);
  grad.b2 = Eigen::VectorXd::Zero(n_items);

  const double denom = static_cast<double>(batch_size) * static_cast<double>(n_items);
  double loss = 0.0;

  // Batched forward/backward. The multi-hot input makes w1*x a column sum.
  Eigen::MatrixXd z1(hidden, batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    Eigen::VectorXd acc = w.b1;
    for (auto item : batch.pairs[b].input) acc += w.w1.col(item);
    z1.col(b) = acc;
  }
  const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  Eigen::MatrixXd z2 = (w.w2 * a1).colwise() + w.b2;  // n_items x batch

  // BCE with binary targets: max(z,0) - z*y + log(1+exp(-|z|)).
  Eigen::MatrixXd dz2(n_items, batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    std::vector<char> is_target(n_items, 0);
    for (auto item : batch.pairs[b].output) is_target[item] = 1;
    for (Eigen::Index i = 0; i < n_items; ++i) {
      const double z = z2(i, b);
      const double y = is_target[i] ? 1.0 : 0.0;
      loss += std::max(z, 0.0) - z * y + softplus_neg_abs(z);
      dz2(i, b) = (sigmoid(z) - y) / denom;
    }
  }
  loss /= denom;

  grad.w2 = dz2 * a1.transpose();
  grad.b2 = dz2.rowwise().sum();
  Eigen::MatrixXd da1 = w.w2.transpose() * dz2;  // hidden x batch
  const Eigen::MatrixXd dz1 =
      da1.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  grad.b1 = dz1.rowwise().sum();
  for (std::size_t b = 0; b < batch_size; ++b)
    for (auto item : batch.pairs[b].input) grad.w1.col(item) += dz1.col(b);

  return {loss, std::move(grad)};
}

MlpWeights mlp_train(const std::vector<MlpPair>& pairs, std::uint64_t n_items,
                     std::uint64_t hidden_dim, std::uint64_t epochs, double learning_rate,
                     std::uint64_t batch_size, std::uint64_t seed) {
  if (pairs.empty()) throw DataError("no training pairs");
  if (batch_size == 0) throw DataError("batch_size must be >= 1");

  MlpWeights w = mlp_init(n_items, hidden_dim, rng::derive(seed, {0}));
  auto eng = rng::make_engine(rng::derive(seed, {1}));

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::uint64_t epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const std::size_t j = i + rng::uniform_below(eng, order.size() - i);
      std::swap(order[i], order[j]);
    }
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      MlpBatch batch;
      const std::size_t end = std::min(order.size(), start + batch_size);
      for (std::size_t t = start; t < end; ++t) batch.pairs.push_back(pairs[order[t]]);
      auto [loss, grad] = mlp_loss_and_grad(w, batch);
      if (!std::isfinite(loss)) throw DataError("training diverged");
      w.w1 -= learning_rate * grad.w1;
      w.b1 -= learning_rate * grad.b1;
      w.w2 -= learning_rate * grad.w2;
      w.b2 -= learning_rate * grad.b2;
    }
  }
  return w;
}

Eigen::VectorXd mlp_forward(const MlpWeights& w, const std::vector<std::uint32_t>& input) {
  Eigen::VectorXd z1 = w.b1;
  for (auto item : input) z1 += w.w1.col(item);
  const Eigen::VectorXd a1 = z1.cwiseMax(0.0);
  Eigen::VectorXd z2 = w.w2 * a1 + w.b2;
  for (Eigen::Index i = 0; i < z2.size(); ++i) z2(i) = sigmoid(z2(i));
  return z2;
}

}  // namespace reprobench

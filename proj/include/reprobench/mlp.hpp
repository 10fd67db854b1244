#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace reprobench {

// One hidden layer: multi-hot item input -> ReLU hidden -> per-item sigmoid.
struct MlpWeights {
  Eigen::MatrixXd w1;  // hidden x n_items
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // n_items x hidden
  Eigen::VectorXd b2;  // n_items

  std::uint64_t n_items() const { return static_cast<std::uint64_t>(w1.cols()); }
  std::uint64_t hidden_dim() const { return static_cast<std::uint64_t>(w1.rows()); }
};

// (input items, target items) pairs over a dense item catalog.
struct MlpPair {
  std::vector<std::uint32_t> input;   // distinct item ids
  std::vector<std::uint32_t> output;  // distinct item ids
};

struct MlpBatch {
  std::vector<MlpPair> pairs;
};

MlpWeights mlp_init(std::uint64_t n_items, std::uint64_t hidden_dim, std::uint64_t seed);

// Mean binary cross-entropy over batch x output units, and its exact gradient.
std::pair<double, MlpWeights> mlp_loss_and_grad(const MlpWeights& w, const MlpBatch& batch);

// Seeded mini-batch SGD. Throws "training diverged" on a non-finite loss.
MlpWeights mlp_train(const std::vector<MlpPair>& pairs, std::uint64_t n_items,
                     std::uint64_t hidden_dim, std::uint64_t epochs, double learning_rate,
                     std::uint64_t batch_size, std::uint64_t seed);

// Per-item sigmoid scores for one multi-hot input.
Eigen::VectorXd mlp_forward(const MlpWeights& w, const std::vector<std::uint32_t>& input);

}  // namespace reprobench

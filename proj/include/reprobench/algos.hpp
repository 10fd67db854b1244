#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reprobench/mlp.hpp"
#include "reprobench/protocol.hpp"

namespace reprobench {

enum class AlgoKind { Random, BestOf, ItemKnn, Svd, Mlp };

std::string algo_kind_name(AlgoKind k);
AlgoKind parse_algo_kind(const std::string& name);

struct AlgoSpec {
  AlgoKind kind = AlgoKind::Random;
  std::string name;  // unique id within a pool; defaults to the kind name
  std::uint64_t seed = 0;
  // item_knn
  std::uint64_t n_neighbors = 50;
  // svd
  std::uint64_t rank = 32;
  std::uint64_t n_power_iterations = 2;
  std::uint64_t oversampling = 10;
  // mlp
  std::uint64_t hidden_dim = 64;
  std::uint64_t epochs = 10;
  double learning_rate = 0.01;
  std::uint64_t batch_size = 128;
};

// What fit() sees of a PDataset. The output strategy is carried along because
// the neural model builds its training pairs the same way the protocol splits
// test sessions.
struct TrainView {
  std::span<const Session> sessions;
  std::uint64_t n_items = 0;
  OutputStrategy output_strategy = OutputStrategy::LastN;
  std::uint64_t n_output_items = 1;
};

TrainView train_view(const PDataset& d);

// Top-k recommendation: parallel (items, scores), scores non-increasing, ties
// broken by item_id ascending, never containing query items or duplicates.
struct RankedList {
  std::vector<std::uint64_t> items;
  std::vector<double> scores;
};

struct ItemNeighbor {
  std::uint32_t item = 0;
  double sim = 0.0;
};

namespace algo_state {
struct Random {};
struct BestOf {
  std::vector<double> popularity;  // train interaction count per dense item
};
struct ItemKnn {
  std::vector<std::vector<ItemNeighbor>> neighbors;  // truncated, sim-descending
};
struct Svd {
  Eigen::MatrixXd item_factors;  // n_items x rank, rows of V
};
struct Mlp {
  MlpWeights weights;
};
}  // namespace algo_state

class RecModel {
 public:
  using State = std::variant<algo_state::Random, algo_state::BestOf,
                             algo_state::ItemKnn, algo_state::Svd, algo_state::Mlp>;

  RecModel(AlgoSpec spec, std::uint64_t n_items, State state);

  // Pure function of (state, input, k). Unknown input items are ignored with
  // a warning on stderr.
  RankedList recommend(std::span<const std::uint64_t> input, std::uint64_t k) const;

  const AlgoSpec& spec() const { return spec_; }
  std::uint64_t n_items() const { return n_items_; }
  const State& state() const { return state_; }

 private:
  AlgoSpec spec_;
  std::uint64_t n_items_ = 0;
  State state_;
};

RecModel fit(const AlgoSpec& spec, const TrainView& train);

}  // namespace reprobench

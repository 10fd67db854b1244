#include "reprobench/algos.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"
#include "reprobench/svd.hpp"

namespace reprobench {

std::string algo_kind_name(AlgoKind k) {
  switch (k) {
    case AlgoKind::Random:
      return "random";
    case AlgoKind::BestOf:
      return "best_of";
    case AlgoKind::ItemKnn:
      return "item_knn";
    case AlgoKind::Svd:
      return "svd";
    case AlgoKind::Mlp:
      return "mlp";
  }
  return "?";
}

AlgoKind parse_algo_kind(const std::string& name) {
  if (name == "random") return AlgoKind::Random;
  if (name == "best_of") return AlgoKind::BestOf;
  if (name == "item_knn") return AlgoKind::ItemKnn;
  if (name == "svd") return AlgoKind::Svd;
  if (name == "mlp") return AlgoKind::Mlp;
  throw ConfigError("unknown algorithm kind '" + name + "'");
}

TrainView train_view(const PDataset& d) {
  return {d.train_sessions, d.n_items(), d.protocol.output_strategy,
          d.protocol.n_output_items};
}

RecModel::RecModel(AlgoSpec spec, std::uint64_t n_items, State state)
    : spec_(std::move(spec)), n_items_(n_items), state_(std::move(state)) {}

namespace {

// user -> distinct dense items, item -> user list, both from train sessions.
struct Incidence {
  std::vector<std::vector<std::uint32_t>> items_of_user;
  std::vector<std::vector<std::uint32_t>> users_of_item;
  std::uint64_t n_users = 0;
};

Incidence build_incidence(const TrainView& train) {
  std::map<std::uint64_t, std::uint32_t> user_row;
  for (const auto& s : train.sessions)
    user_row.emplace(s.user_id, 0);
  std::uint32_t next = 0;
  for (auto& [id, row] : user_row) row = next++;

  Incidence inc;
  inc.n_users = user_row.size();
  inc.items_of_user.resize(inc.n_users);
  for (const auto& s : train.sessions) {
    auto& items = inc.items_of_user[user_row[s.user_id]];
    for (const auto& e : s.events) items.push_back(static_cast<std::uint32_t>(e.item_id));
  }
  for (auto& items : inc.items_of_user) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  inc.users_of_item.resize(train.n_items);
  for (std::uint32_t u = 0; u < inc.items_of_user.size(); ++u)
    for (auto item : inc.items_of_user[u]) inc.users_of_item[item].push_back(u);
  return inc;
}

algo_state::BestOf fit_best_of(const TrainView& train) {
  algo_state::BestOf st;
  st.popularity.assign(train.n_items, 0.0);
  for (const auto& s : train.sessions)
    for (const auto& e : s.events) st.popularity[e.item_id] += 1.0;
  return st;
}

algo_state::ItemKnn fit_item_knn(const TrainView& train, std::uint64_t n_neighbors) {
  if (n_neighbors == 0) throw DataError("n_neighbors must be >= 1");
  const auto inc = build_incidence(train);
  algo_state::ItemKnn st;
  st.neighbors.resize(train.n_items);

  std::vector<std::uint32_t> overlap(train.n_items, 0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t i = 0; i < train.n_items; ++i) {
    const auto deg_i = inc.users_of_item[i].size();
    if (deg_i == 0) continue;
    touched.clear();
    for (auto u : inc.users_of_item[i]) {
      for (auto j : inc.items_of_user[u]) {
        if (j == i) continue;
        if (overlap[j] == 0) touched.push_back(j);
        ++overlap[j];
      }
    }
    auto& nbrs = st.neighbors[i];
    nbrs.reserve(touched.size());
    for (auto j : touched) {
      const double sim = overlap[j] / std::sqrt(static_cast<double>(deg_i) *
                                                static_cast<double>(inc.users_of_item[j].size()));
      nbrs.push_back({j, sim});
      overlap[j] = 0;
    }
    auto by_sim = [](const ItemNeighbor& a, const ItemNeighbor& b) {
      return a.sim > b.sim || (a.sim == b.sim && a.item < b.item);
    };
    if (nbrs.size() > n_neighbors) {
      std::partial_sort(nbrs.begin(), nbrs.begin() + n_neighbors, nbrs.end(), by_sim);
      nbrs.resize(n_neighbors);
    } else {
      std::sort(nbrs.begin(), nbrs.end(), by_sim);
    }
    nbrs.shrink_to_fit();
  }
  return st;
}

algo_state::Svd fit_svd(const AlgoSpec& spec, const TrainView& train) {
  const auto inc = build_incidence(train);
  if (spec.rank >= std::min<std::uint64_t>(inc.n_users, train.n_items))
    throw DataError("svd rank must be < min(n_users, n_items)");
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(inc.n_users),
                                static_cast<Eigen::Index>(train.n_items));
  std::vector<Eigen::Triplet<double>> trips;
  for (std::uint32_t u = 0; u < inc.items_of_user.size(); ++u)
    for (auto item : inc.items_of_user[u])
      trips.emplace_back(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(item), 1.0);
  a.setFromTriplets(trips.begin(), trips.end());

  auto svd = randomized_svd(a, spec.rank, spec.oversampling, spec.n_power_iterations, spec.seed);
  return {std::move(svd.v)};
}

algo_state::Mlp fit_mlp(const AlgoSpec& spec, const TrainView& train) {
  std::vector<MlpPair> pairs;
  std::unordered_map<std::uint64_t, std::uint64_t> per_user_counter;
  for (const auto& s : train.sessions) {
    const std::uint64_t ord = per_user_counter[s.user_id]++;
    const std::uint64_t seed = rng::derive(spec.seed, {s.user_id, ord});
    auto split = split_input_output(s, train.output_strategy, train.n_output_items, seed);
    if (!split) continue;
    MlpPair p;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& e : split->input.events)
      if (seen.insert(e.item_id).second) p.input.push_back(static_cast<std::uint32_t>(e.item_id));
    std::sort(p.input.begin(), p.input.end());
    for (auto item : split->output) p.output.push_back(static_cast<std::uint32_t>(item));
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) throw DataError("no training pairs");
  return {mlp_train(pairs, train.n_items, spec.hidden_dim, spec.epochs, spec.learning_rate,
                    spec.batch_size, spec.seed)};
}

}  // namespace

RecModel fit(const AlgoSpec& spec, const TrainView& train) {
  if (train.sessions.empty()) throw DataError("empty training set");
  if (train.n_items < 2) throw DataError("catalog must have at least 2 items");

  switch (spec.kind) {
    case AlgoKind::Random:
      return {spec, train.n_items, algo_state::Random{}};
    case AlgoKind::BestOf:
      return {spec, train.n_items, fit_best_of(train)};
    case AlgoKind::ItemKnn:
      return {spec, train.n_items, fit_item_knn(train, spec.n_neighbors)};
    case AlgoKind::Svd:
      return {spec, train.n_items, fit_svd(spec, train)};
    case AlgoKind::Mlp:
      return {spec, train.n_items, fit_mlp(spec, train)};
  }
  throw ConfigError("unknown algorithm kind");
}

RankedList RecModel::recommend(std::span<const std::uint64_t> input, std::uint64_t k) const {
  if (k == 0) throw DataError("k must be >= 1");

  std::vector<std::uint32_t> known;
  known.reserve(input.size());
  std::size_t unknown = 0;
  std::vector<char> in_input(n_items_, 0);
  for (auto item : input) {
    if (item >= n_items_) {
      ++unknown;
      continue;
    }
    if (!in_input[item]) {
      in_input[item] = 1;
      known.push_back(static_cast<std::uint32_t>(item));
    }
  }
  if (unknown > 0)
    std::cerr << "warning: ignoring " << unknown << " input item(s) outside the catalog\n";

  std::uint64_t n_eligible = 0;
  for (std::uint64_t i = 0; i < n_items_; ++i)
    if (!in_input[i]) ++n_eligible;
  if (n_eligible == 0) throw DataError("empty eligible catalog");

  std::vector<double> scores(n_items_, 0.0);
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, algo_state::Random>) {
          // Pure in (seed, input, item): hash-derived scores.
          std::uint64_t digest = rng::splitmix64(spec_.seed);
          for (auto item : input) digest = rng::splitmix64(digest ^ rng::splitmix64(item));
          for (std::uint64_t i = 0; i < n_items_; ++i)
            scores[i] = rng::to_unit(rng::derive(digest, {i}));
        } else if constexpr (std::is_same_v<T, algo_state::BestOf>) {
          scores = st.popularity;
        } else if constexpr (std::is_same_v<T, algo_state::ItemKnn>) {
          for (auto i : known)
            for (const auto& nb : st.neighbors[i]) scores[nb.item] += nb.sim;
        } else if constexpr (std::is_same_v<T, algo_state::Svd>) {
          if (!known.empty()) {
            Eigen::RowVectorXd q =
                Eigen::RowVectorXd::Zero(st.item_factors.cols());
            for (auto i : known) q += st.item_factors.row(i);
            q /= static_cast<double>(known.size());
            Eigen::VectorXd s = st.item_factors * q.transpose();
            for (std::uint64_t i = 0; i < n_items_; ++i) scores[i] = s(i);
          }
        } else if constexpr (std::is_same_v<T, algo_state::Mlp>) {
          Eigen::VectorXd s = mlp_forward(st.weights, known);
          for (std::uint64_t i = 0; i < n_items_; ++i) scores[i] = s(i);
        }
      },
      state_);

  std::vector<std::uint32_t> candidates;
  candidates.reserve(n_eligible);
  for (std::uint32_t i = 0; i < n_items_; ++i)
    if (!in_input[i]) candidates.push_back(i);

  const std::uint64_t out_len = std::min<std::uint64_t>(k, n_eligible);
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(candidates.begin(), candidates.begin() + out_len, candidates.end(), better);

  RankedList out;
  out.items.reserve(out_len);
  out.scores.reserve(out_len);
  for (std::uint64_t t = 0; t < out_len; ++t) {
    out.items.push_back(candidates[t]);
    out.scores.push_back(scores[candidates[t]]);
  }
  return out;
}

}  // namespace reprobench

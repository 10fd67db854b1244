#include "reprobench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"

namespace reprobench {

namespace {

double snap_rating(double value) {
  const double snapped = std::round(value * 2.0) / 2.0;
  return std::clamp(snapped, 1.0, 5.0);
}

}  // namespace

RawDataset generate_synthetic(const SynthSpec& spec, SynthDebug* debug) {
  if (spec.n_users == 0 || spec.n_items == 0) throw DataError("need users and items");
  if (spec.mean_events_per_user <= 0.0) throw DataError("expected event count is 0");
  if (spec.popularity_skew <= 0.0) throw DataError("popularity_skew must be positive");
  if (spec.taste_dim == 0) throw DataError("taste_dim must be >= 1");
  if (spec.rating_noise < 0.0) throw DataError("rating_noise must be non-negative");

  auto eng = rng::make_engine(spec.seed);

  Eigen::MatrixXd users(spec.n_users, spec.taste_dim);
  Eigen::MatrixXd items(spec.n_items, spec.taste_dim);
  for (Eigen::Index i = 0; i < users.rows(); ++i)
    for (Eigen::Index c = 0; c < users.cols(); ++c) users(i, c) = rng::normal(eng);
  for (Eigen::Index i = 0; i < items.rows(); ++i)
    for (Eigen::Index c = 0; c < items.cols(); ++c) items(i, c) = rng::normal(eng);

  // Zipf popularity over item index.
  std::vector<double> zipf(spec.n_items);
  for (std::uint64_t j = 0; j < spec.n_items; ++j)
    zipf[j] = std::pow(static_cast<double>(j + 1), -spec.popularity_skew);

  const double affinity_scale = 1.0 / std::sqrt(static_cast<double>(spec.taste_dim));

  RawDataset d;
  d.source_id = spec.source_id;
  d.rating_scale = {1.0, 5.0, 0.5};

  std::vector<double> cdf(spec.n_items);
  Eigen::VectorXd affinity(spec.n_items);
  for (std::uint64_t u = 0; u < spec.n_users; ++u) {
    const std::uint64_t n_events = rng::poisson(eng, spec.mean_events_per_user);

    affinity = items * users.row(u).transpose() * affinity_scale;
    const double max_aff = affinity.maxCoeff();
    double total = 0.0;
    for (std::uint64_t j = 0; j < spec.n_items; ++j) {
      total += zipf[j] * std::exp(affinity(j) - max_aff);
      cdf[j] = total;
    }

    std::int64_t ts = static_cast<std::int64_t>(rng::uniform_below(eng, 30ull * 86400ull));
    for (std::uint64_t e = 0; e < n_events; ++e) {
      const double target = rng::uniform01(eng) * total;
      auto j = static_cast<std::uint64_t>(
          std::distance(cdf.begin(), std::lower_bound(cdf.begin(), cdf.end(), target)));
      if (j >= spec.n_items) j = spec.n_items - 1;

      double rating = 3.0 + affinity(j);
      if (spec.rating_noise > 0.0) rating += spec.rating_noise * rng::normal(eng);

      d.interactions.push_back({u, j, snap_rating(rating), ts});
      // Strictly increasing per-user timestamps keep the triples unique.
      ts += 1 + static_cast<std::int64_t>(rng::exponential(eng, 1800.0));
    }
  }
  if (d.interactions.empty()) throw DataError("expected event count is 0");

  normalize_dataset(d);
  if (debug) {
    debug->user_factors = std::move(users);
    debug->item_factors = std::move(items);
  }
  return d;
}

}  // namespace reprobench

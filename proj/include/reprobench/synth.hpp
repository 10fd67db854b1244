#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "reprobench/ingest.hpp"

namespace reprobench {

// Seeded synthetic rating-log generator: latent-factor affinities mixed with
// Zipf popularity, Poisson event counts, exponential inter-event gaps.
struct SynthSpec {
  std::uint64_t n_users = 100;
  std::uint64_t n_items = 50;
  double popularity_skew = 1.0;  // Zipf exponent
  std::uint64_t taste_dim = 8;
  double mean_events_per_user = 20.0;
  double rating_noise = 0.5;
  std::uint64_t seed = 0;
  std::string source_id = "synthetic";
};

struct SynthDebug {
  Eigen::MatrixXd user_factors;  // n_users x taste_dim
  Eigen::MatrixXd item_factors;  // n_items x taste_dim
};

RawDataset generate_synthetic(const SynthSpec& spec, SynthDebug* debug = nullptr);

}  // namespace reprobench

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reprobench/metrics.hpp"

namespace reprobench {

// Mean scores of every algorithm under one metric, in a fixed pool order.
struct PerformanceVector {
  MetricId metric;
  std::vector<double> scores;
};

// Flattened metric x algorithm score matrix, metric-major: index(i,j) = i*A+j.
// Signatures are only comparable when their pools match.
struct Signature {
  std::vector<double> values;
  std::vector<MetricId> metric_order;
  std::vector<std::string> algo_order;
};

struct PairCorrelation {
  std::uint64_t protocol_i = 0;
  std::uint64_t protocol_j = 0;
  double rho = 0.0;
};

struct RobustnessReport {
  std::string dataset_id;
  MetricId metric;
  double robustness = 0.0;  // 5th percentile of the pairwise correlations
  std::vector<PairCorrelation> pair_correlations;
  std::uint64_t n_pdatasets = 0;
  std::uint64_t n_skipped_pairs = 0;  // pairs with a constant vector
};

PerformanceVector performance_vector(const MetricTable& t, const MetricId& metric,
                                     std::span<const std::string> algo_order);

// Pairwise Spearman over all p-dataset pairs (i<j); constant vectors skip the
// pair. protocol_ids, when given, label the pairs (defaults to indices).
RobustnessReport robustness(std::span<const PerformanceVector> vectors,
                            const std::string& dataset_id,
                            std::span<const std::uint64_t> protocol_ids = {});

Signature signature(const MetricTable& t, std::span<const MetricId> metric_order,
                    std::span<const std::string> algo_order);

struct SelectionResult {
  std::uint64_t protocol_id = 0;
  double distance = 0.0;
};

// Nearest pool signature by Euclidean distance, ties by protocol id ascending.
// zscore normalizes each coordinate with pool statistics first.
SelectionResult select_protocol(const Signature& target,
                                std::span<const std::pair<std::uint64_t, Signature>> pool,
                                bool zscore = false);

enum class EmbedMethod { Pca, Tsne };
EmbedMethod parse_embed_method(const std::string& name);

// 2-D embedding of signatures: top-2 principal components, or exact t-SNE
// (perplexity min(5,(n-1)/3), 1000 iterations, seeded init).
std::vector<std::array<double, 2>> embed_2d(std::span<const Signature> signatures,
                                            EmbedMethod method, std::uint64_t seed);

}  // namespace reprobench

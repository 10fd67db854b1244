#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reprobench/algos.hpp"
#include "reprobench/protocol.hpp"

namespace reprobench {

enum class MetricFamily { Precision, Recall, Mrr, Ndcg, ItemCoverage, Apt };

// Serialized as "family@k", e.g. "ndcg@10".
struct MetricId {
  MetricFamily family = MetricFamily::Precision;
  std::uint64_t k = 10;

  std::string str() const;
  static MetricId parse(const std::string& text);

  friend bool operator==(const MetricId&, const MetricId&) = default;
  friend auto operator<=>(const MetricId&, const MetricId&) = default;
};

bool is_set_level(MetricFamily f);  // item_coverage / apt

// Catalog-level context for the diversity metrics. long_tail is the catalog
// minus the smallest popularity-sorted head accumulating head_share of the
// train interactions (ties by item_id ascending).
struct EvalContext {
  std::uint64_t n_items = 0;
  std::vector<std::uint64_t> popularity;  // per dense item id
  std::vector<bool> long_tail;

  static EvalContext from_train(std::span<const Session> train_sessions,
                                std::uint64_t n_items, double head_share = 0.2);
};

// Per-pair metrics: `rec` truncated to its first k items, `rel` a sorted
// non-empty set of relevant items.
double precision_at_k(const RankedList& rec, std::span<const std::uint64_t> rel, std::uint64_t k);
double recall_at_k(const RankedList& rec, std::span<const std::uint64_t> rel, std::uint64_t k);
double mrr_at_k(const RankedList& rec, std::span<const std::uint64_t> rel, std::uint64_t k);
double ndcg_at_k(const RankedList& rec, std::span<const std::uint64_t> rel, std::uint64_t k);

// Set-level metrics over all test pairs' recommendations.
double item_coverage_at_k(std::span<const RankedList> all_recs, const EvalContext& ctx,
                          std::uint64_t k);
double apt_at_k(std::span<const RankedList> all_recs, const EvalContext& ctx, std::uint64_t k);

struct MetricEntry {
  double mean = 0.0;
  double stdev = 0.0;
};

// entries[metric_index][algo_index], orders recorded alongside.
struct MetricTable {
  std::vector<MetricId> metric_order;
  std::vector<std::string> algo_order;
  std::vector<std::vector<MetricEntry>> entries;
  std::uint64_t n_test_pairs = 0;

  const MetricEntry& at(const MetricId& m, const std::string& algo) const;
};

// Evaluates one fitted model over every test pair; stds are bootstrap stds
// over test pairs (resample indices shared across metrics).
std::vector<MetricEntry> evaluate_model(const PDataset& d, const RecModel& model,
                                        std::span<const MetricId> metric_ids,
                                        std::uint64_t n_boot, std::uint64_t seed);

MetricTable evaluate_all(const PDataset& d, std::span<const RecModel> models,
                         std::span<const MetricId> metric_ids, std::uint64_t n_boot,
                         std::uint64_t seed);

}  // namespace reprobench

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reprobench/analysis.hpp"
#include "reprobench/runner.hpp"

namespace reprobench {

// A pair of protocols whose algorithm rankings disagree (rho < 1) with a
// different top-ranked algorithm.
struct RankingFlip {
  std::uint64_t protocol_a = 0;
  std::uint64_t protocol_b = 0;
  double rho = 0.0;
  std::string top_a;
  std::string top_b;
};

RobustnessReport robustness_from_results(const RunResults& r, const MetricId& metric);

std::vector<std::pair<std::uint64_t, Signature>> signatures_from_results(const RunResults& r);

std::vector<RankingFlip> find_ranking_flips(const RunResults& r, const MetricId& metric);

// Emits the figure-style data files into out_dir:
//   robustness_by_dataset.csv   one row per (dataset, metric) + mean_over_metrics
//   scores_<dataset>.csv        per-protocol algorithm means with bootstrap std
//   flips_<dataset>.csv         detected ranking flips for `metric`
//   embedding.csv               2-D signature coordinates over all datasets
// plus matching SVG renderings.
void write_report(const std::vector<RunResults>& runs, const MetricId& metric,
                  EmbedMethod embed_method, std::uint64_t embed_seed,
                  const std::filesystem::path& out_dir);

void write_signatures_file(const std::vector<std::pair<std::uint64_t, Signature>>& sigs,
                           const std::vector<MetricId>& metric_order,
                           const std::vector<std::string>& algo_order,
                           const std::string& dataset_id,
                           const std::filesystem::path& path);

struct SignatureFile {
  std::string dataset_id;
  std::vector<MetricId> metric_order;
  std::vector<std::string> algo_order;
  std::vector<std::pair<std::uint64_t, Signature>> signatures;
};

SignatureFile read_signatures_file(const std::filesystem::path& path);

}  // namespace reprobench

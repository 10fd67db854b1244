#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "reprobench/algos.hpp"
#include "reprobench/ingest.hpp"
#include "reprobench/metrics.hpp"
#include "reprobench/protocol.hpp"

namespace reprobench {

struct RunConfig {
  std::filesystem::path dataset_path;
  SourceFormat format = SourceFormat::Canonical;
  GridSpec grid;
  std::vector<AlgoSpec> algorithms;
  std::vector<MetricId> metrics;
  std::uint64_t n_boot = 100;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "out";
  std::uint64_t parallelism = 0;  // 0 = auto
};

GridSpec grid_from_json(const nlohmann::json& j);
nlohmann::ordered_json grid_to_json(const GridSpec& g);

AlgoSpec algo_spec_from_json(const nlohmann::json& j);

nlohmann::ordered_json protocol_to_json(const Protocol& p);
Protocol protocol_from_json(const nlohmann::json& j);

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

// FNV-1a over the canonical config dump, hex encoded.
std::string config_hash(const nlohmann::json& j);

}  // namespace reprobench

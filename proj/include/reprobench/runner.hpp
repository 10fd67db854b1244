#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reprobench/config.hpp"
#include "reprobench/metrics.hpp"
#include "reprobench/protocol.hpp"

namespace reprobench {

struct ProtocolResult {
  std::uint64_t id = 0;
  Protocol protocol;
  bool ok = false;
  std::string skip_reason;
  MetricTable table;  // populated when ok
};

struct RunResults {
  std::string tool;
  std::string version;
  std::string config_hash;
  std::string source_id;
  std::uint64_t master_seed = 0;
  std::vector<MetricId> metric_order;
  std::vector<std::string> algo_order;
  std::vector<ProtocolResult> protocols;  // one entry per grid protocol, in id order

  std::uint64_t n_ok() const;
};

// Builds every grid p-dataset, fits every algorithm, evaluates every metric.
// Protocol failures become recorded skips; per-task seeds derive from
// (master_seed, protocol index, algorithm index) so results are identical
// across runs and parallelism levels.
RunResults run_experiment(const RunConfig& config);

// results.json + manifest.json, byte-stable.
void write_run_results(const RunResults& r, const std::filesystem::path& out_dir);
RunResults read_run_results(const std::filesystem::path& results_file);

nlohmann::ordered_json run_results_to_json(const RunResults& r);
RunResults run_results_from_json(const nlohmann::json& j);

}  // namespace reprobench

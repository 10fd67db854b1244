#include "reprobench/runner.hpp"

#include <atomic>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"
#include "reprobench/version.hpp"

namespace reprobench {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::uint64_t kEvalSeedTag = 0xE7A1;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

ordered_json config_fingerprint(const RunConfig& config) {
  // The parts of the config that determine the numbers (not output paths or
  // parallelism, which must not change results).
  ordered_json j;
  j["dataset"] = config.dataset_path.filename().string();
  j["format"] = format_name(config.format);
  j["grid"] = grid_to_json(config.grid);
  ordered_json algos = ordered_json::array();
  for (const auto& a : config.algorithms) {
    ordered_json e;
    e["kind"] = algo_kind_name(a.kind);
    e["name"] = a.name;
    e["seed"] = a.seed;
    switch (a.kind) {
      case AlgoKind::ItemKnn:
        e["n_neighbors"] = a.n_neighbors;
        break;
      case AlgoKind::Svd:
        e["rank"] = a.rank;
        e["n_power_iterations"] = a.n_power_iterations;
        e["oversampling"] = a.oversampling;
        break;
      case AlgoKind::Mlp:
        e["hidden_dim"] = a.hidden_dim;
        e["epochs"] = a.epochs;
        e["learning_rate"] = a.learning_rate;
        e["batch_size"] = a.batch_size;
        break;
      default:
        break;
    }
    algos.push_back(e);
  }
  j["algorithms"] = algos;
  ordered_json metrics = ordered_json::array();
  for (const auto& m : config.metrics) metrics.push_back(m.str());
  j["metrics"] = metrics;
  j["n_boot"] = config.n_boot;
  j["master_seed"] = config.master_seed;
  return j;
}

}  // namespace

std::uint64_t RunResults::n_ok() const {
  std::uint64_t n = 0;
  for (const auto& p : protocols) n += p.ok ? 1 : 0;
  return n;
}

RunResults run_experiment(const RunConfig& config) {
  const RawDataset raw = parse_interactions(config.format, config.dataset_path);
  const auto protocols = enumerate_grid(config.grid);
  const std::size_t n_protocols = protocols.size();
  const std::size_t n_algos = config.algorithms.size();

  RunResults results;
  results.tool = kToolName;
  results.version = kToolVersion;
  results.config_hash = config_hash(config_fingerprint(config));
  results.source_id = raw.source_id;
  results.master_seed = config.master_seed;
  results.metric_order = config.metrics;
  for (const auto& a : config.algorithms) results.algo_order.push_back(a.name);

  struct ProtoSlot {
    std::once_flag once;
    std::shared_ptr<const PDataset> data;
    std::string build_error;
    std::uint64_t n_test_pairs = 0;
    std::atomic<std::size_t> remaining_tasks{0};
  };
  struct TaskSlot {
    std::vector<MetricEntry> column;
    std::string error;
  };
  std::vector<ProtoSlot> proto_slots(n_protocols);
  for (auto& s : proto_slots) s.remaining_tasks = n_algos;
  std::vector<std::vector<TaskSlot>> task_slots(n_protocols);
  for (auto& row : task_slots) row.resize(n_algos);

  const std::size_t total_tasks = n_protocols * n_algos;
  std::size_t n_threads = config.parallelism != 0
                              ? config.parallelism
                              : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, total_tasks);

  std::atomic<std::size_t> next_task{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next_task.fetch_add(1);
      if (t >= total_tasks) break;
      const std::size_t p = t / n_algos;
      const std::size_t a = t % n_algos;
      auto& slot = proto_slots[p];
      std::call_once(slot.once, [&] {
        try {
          slot.data = std::make_shared<const PDataset>(build_pdataset(raw, protocols[p]));
          slot.n_test_pairs = slot.data->test_pairs.size();
        } catch (const std::exception& e) {
          slot.build_error = e.what();
        }
      });
      if (slot.build_error.empty()) {
        try {
          AlgoSpec spec = config.algorithms[a];
          spec.seed = rng::derive(config.master_seed, {p, a, spec.seed});
          const RecModel model = fit(spec, train_view(*slot.data));
          task_slots[p][a].column = evaluate_model(
              *slot.data, model, config.metrics, config.n_boot,
              rng::derive(config.master_seed, {p, a, kEvalSeedTag}));
        } catch (const std::exception& e) {
          task_slots[p][a].error = e.what();
        }
      }
      if (slot.remaining_tasks.fetch_sub(1) == 1) slot.data.reset();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (auto& th : threads) th.join();

  for (std::size_t p = 0; p < n_protocols; ++p) {
    ProtocolResult pr;
    pr.id = p;
    pr.protocol = protocols[p];
    if (!proto_slots[p].build_error.empty()) {
      pr.ok = false;
      pr.skip_reason = proto_slots[p].build_error;
    } else {
      pr.ok = true;
      for (std::size_t a = 0; a < n_algos && pr.ok; ++a) {
        if (!task_slots[p][a].error.empty()) {
          pr.ok = false;
          pr.skip_reason =
              "algorithm '" + results.algo_order[a] + "': " + task_slots[p][a].error;
        }
      }
    }
    if (pr.ok) {
      MetricTable table;
      table.metric_order = config.metrics;
      table.algo_order = results.algo_order;
      table.n_test_pairs = proto_slots[p].n_test_pairs;
      table.entries.assign(config.metrics.size(), std::vector<MetricEntry>(n_algos));
      for (std::size_t a = 0; a < n_algos; ++a)
        for (std::size_t m = 0; m < config.metrics.size(); ++m)
          table.entries[m][a] = task_slots[p][a].column[m];
      pr.table = std::move(table);
    }
    results.protocols.push_back(std::move(pr));
  }
  return results;
}

nlohmann::ordered_json run_results_to_json(const RunResults& r) {
  ordered_json j;
  j["tool"] = r.tool;
  j["version"] = r.version;
  j["config_hash"] = r.config_hash;
  j["source_id"] = r.source_id;
  j["master_seed"] = r.master_seed;
  ordered_json metric_order = ordered_json::array();
  for (const auto& m : r.metric_order) metric_order.push_back(m.str());
  j["metric_order"] = metric_order;
  j["algo_order"] = r.algo_order;
  ordered_json protocols = ordered_json::array();
  for (const auto& p : r.protocols) {
    ordered_json e;
    e["id"] = p.id;
    e["protocol"] = protocol_to_json(p.protocol);
    e["status"] = p.ok ? "ok" : "skipped";
    if (!p.ok) {
      e["reason"] = p.skip_reason;
    } else {
      e["n_test_pairs"] = p.table.n_test_pairs;
      ordered_json table;
      for (std::size_t m = 0; m < p.table.metric_order.size(); ++m) {
        ordered_json row;
        for (std::size_t a = 0; a < p.table.algo_order.size(); ++a) {
          ordered_json cell;
          cell["mean"] = p.table.entries[m][a].mean;
          cell["std"] = p.table.entries[m][a].stdev;
          row[p.table.algo_order[a]] = cell;
        }
        table[p.table.metric_order[m].str()] = row;
      }
      e["results"] = table;
    }
    protocols.push_back(e);
  }
  j["protocols"] = protocols;
  return j;
}

RunResults run_results_from_json(const json& j) {
  RunResults r;
  r.tool = j.value("tool", "");
  r.version = j.value("version", "");
  r.config_hash = j.value("config_hash", "");
  r.source_id = j.value("source_id", "");
  r.master_seed = j.value("master_seed", std::uint64_t{0});
  for (const auto& m : j.at("metric_order")) r.metric_order.push_back(MetricId::parse(m));
  for (const auto& a : j.at("algo_order")) r.algo_order.push_back(a.get<std::string>());
  for (const auto& e : j.at("protocols")) {
    ProtocolResult pr;
    pr.id = e.at("id").get<std::uint64_t>();
    pr.protocol = protocol_from_json(e.at("protocol"));
    pr.ok = e.at("status").get<std::string>() == "ok";
    if (!pr.ok) {
      pr.skip_reason = e.value("reason", "");
    } else {
      pr.table.metric_order = r.metric_order;
      pr.table.algo_order = r.algo_order;
      pr.table.n_test_pairs = e.value("n_test_pairs", std::uint64_t{0});
      pr.table.entries.assign(r.metric_order.size(),
                              std::vector<MetricEntry>(r.algo_order.size()));
      const auto& table = e.at("results");
      for (std::size_t m = 0; m < r.metric_order.size(); ++m) {
        const auto& row = table.at(r.metric_order[m].str());
        for (std::size_t a = 0; a < r.algo_order.size(); ++a) {
          const auto& cell = row.at(r.algo_order[a]);
          pr.table.entries[m][a] = {cell.at("mean").get<double>(),
                                    cell.at("std").get<double>()};
        }
      }
    }
    r.protocols.push_back(std::move(pr));
  }
  return r;
}

void write_run_results(const RunResults& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "results.json", run_results_to_json(r).dump(2) + "\n");

  ordered_json manifest;
  manifest["tool"] = r.tool;
  manifest["version"] = r.version;
  manifest["config_hash"] = r.config_hash;
  manifest["source_id"] = r.source_id;
  manifest["master_seed"] = r.master_seed;
  manifest["n_protocols"] = r.protocols.size();
  manifest["n_ok"] = r.n_ok();
  ordered_json entries = ordered_json::array();
  for (const auto& p : r.protocols) {
    ordered_json e;
    e["id"] = p.id;
    e["status"] = p.ok ? "ok" : "skipped";
    if (!p.ok) e["reason"] = p.skip_reason;
    e["protocol"] = protocol_to_json(p.protocol);
    entries.push_back(e);
  }
  manifest["protocols"] = entries;
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

RunResults read_run_results(const std::filesystem::path& results_file) {
  std::ifstream in(results_file);
  if (!in) throw DataError("cannot open results '" + results_file.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("results parse error in '" + results_file.string() + "': " + e.what());
  }
  try {
    return run_results_from_json(j);
  } catch (const json::exception& e) {
    throw DataError("results schema error in '" + results_file.string() + "': " + e.what());
  }
}

}  // namespace reprobench

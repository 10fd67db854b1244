#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "helpers.hpp"
#include "reprobench/config.hpp"
#include "reprobench/runner.hpp"
#include "reprobench/synth.hpp"

using namespace reprobench;
using nlohmann::json;
using nlohmann::ordered_json;
using testutil::temp_dir;
using testutil::write_file;

namespace {

int run_cli(const std::string& args, const std::filesystem::path& stdout_file) {
  const std::string cmd =
      std::string(REPROBENCH_CLI_PATH) + " " + args + " > " + stdout_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("grid subcommand counts the cartesian product") {
  const auto dir = temp_dir("cli");
  write_file(dir / "grid.json",
             R"({"rating_threshold": [1.0, 2.0], "n_output_items": [1, 2, 3]})");
  const auto out = dir / "grid_stdout.txt";
  REQUIRE(run_cli("grid --config " + (dir / "grid.json").string() + " --out " +
                      (dir / "manifest.json").string(),
                  out) == 0);
  std::ifstream in(dir / "manifest.json");
  json manifest;
  in >> manifest;
  CHECK(manifest["n_protocols"] == 6);
  CHECK(manifest["protocols"].size() == 6);
}

TEST_CASE("robustness subcommand reproduces the percentile case") {
  // Craft a results file with three protocols whose precision vectors give
  // pairwise rho 1, 0.5, 0.5 -> 5th percentile 0.5.
  const auto dir = temp_dir("cli");
  ordered_json j;
  j["tool"] = "reprobench";
  j["version"] = "0.1.0";
  j["config_hash"] = "0";
  j["source_id"] = "crafted";
  j["master_seed"] = 0;
  j["metric_order"] = {"precision@10"};
  j["algo_order"] = {"a", "b", "c"};
  auto proto = [&](std::uint64_t id, std::vector<double> means) {
    ordered_json e;
    e["id"] = id;
    e["protocol"] = protocol_to_json(Protocol{});
    e["status"] = "ok";
    e["n_test_pairs"] = 10;
    ordered_json row;
    const char* names[] = {"a", "b", "c"};
    for (int i = 0; i < 3; ++i) row[names[i]] = {{"mean", means[i]}, {"std", 0.0}};
    e["results"]["precision@10"] = row;
    return e;
  };
  j["protocols"] = ordered_json::array();
  j["protocols"].push_back(proto(0, {1, 2, 3}));
  j["protocols"].push_back(proto(1, {1, 2, 3}));
  j["protocols"].push_back(proto(2, {2, 1, 3}));
  write_file(dir / "crafted.json", j.dump(2));

  const auto out = dir / "rob_stdout.txt";
  REQUIRE(run_cli("robustness --results " + (dir / "crafted.json").string() +
                      " --metric precision@10",
                  out) == 0);
  const auto text = testutil::read_file(out);
  CHECK(text.find("= 0.5") != std::string::npos);
}

TEST_CASE("select subcommand returns a pool member at distance zero") {
  const auto dir = temp_dir("cli");
  ordered_json sigs;
  sigs["dataset_id"] = "pool";
  sigs["metric_order"] = {"precision@10"};
  sigs["algo_order"] = {"a", "b"};
  sigs["signatures"] = ordered_json::array();
  sigs["signatures"].push_back({{"protocol_id", 0}, {"values", {0.1, 0.9}}});
  sigs["signatures"].push_back({{"protocol_id", 1}, {"values", {0.4, 0.2}}});
  write_file(dir / "sigs.json", sigs.dump(2));

  const auto out = dir / "select_stdout.txt";
  REQUIRE(run_cli("select --target " + (dir / "sigs.json").string() + " --target-id 1 --pool " +
                      (dir / "sigs.json").string(),
                  out) == 0);
  const auto text = testutil::read_file(out);
  CHECK(text.find("protocol 1 distance 0") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  const auto dir = temp_dir("cli");
  const auto out = dir / "exit_stdout.txt";
  SUBCASE("unknown flags are usage errors") {
    CHECK(run_cli("grid --nope", out) == 1);
  }
  SUBCASE("missing files are data errors") {
    CHECK(run_cli("ingest --format ml-100k --input /definitely/not/here.data", out) == 2);
  }
  SUBCASE("config errors are usage errors") {
    write_file(dir / "bad_config.json", R"({"grid": {}})");
    CHECK(run_cli("run --config " + (dir / "bad_config.json").string(), out) == 1);
  }
}

TEST_CASE("run followed by the analysis subcommands") {
  const auto dir = temp_dir("cli_run");
  SynthSpec spec;
  spec.n_users = 100;
  spec.n_items = 30;
  spec.mean_events_per_user = 15.0;
  spec.seed = 8;
  spec.source_id = "cli_synth";
  write_canonical(generate_synthetic(spec), dir / "data.csv");

  ordered_json config;
  config["dataset"] = {{"path", "data.csv"}, {"format", "canonical"}};
  config["grid"] = {{"rating_threshold", {1.0, 3.0, 4.0}},
                    {"n_output_items", {1, 2}},
                    {"test_fraction", {0.3}}};
  config["algorithms"] = ordered_json::array();
  config["algorithms"].push_back({{"kind", "random"}});
  config["algorithms"].push_back({{"kind", "best_of"}});
  config["metrics"] = {"precision@10", "ndcg@10"};
  config["n_boot"] = 30;
  config["master_seed"] = 3;
  config["output_dir"] = "run_out";
  write_file(dir / "config.json", config.dump(2));

  const auto out = dir / "stdout.txt";
  REQUIRE(run_cli("run --config " + (dir / "config.json").string(), out) == 0);
  REQUIRE(std::filesystem::exists(dir / "run_out/results.json"));
  REQUIRE(std::filesystem::exists(dir / "run_out/manifest.json"));

  CHECK(run_cli("signature --results " + (dir / "run_out/results.json").string() + " --out " +
                    (dir / "sigs.json").string(),
                out) == 0);
  CHECK(run_cli("embed --signatures " + (dir / "sigs.json").string() + " --method pca --out " +
                    (dir / "coords.csv").string(),
                out) == 0);
  CHECK(std::filesystem::exists(dir / "coords.csv"));
  CHECK(run_cli("report --results " + (dir / "run_out/results.json").string() +
                    " --metric precision@10 --out-dir " + (dir / "report").string(),
                out) == 0);
  CHECK(std::filesystem::exists(dir / "report/robustness_by_dataset.csv"));
}

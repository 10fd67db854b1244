#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "reprobench/analysis.hpp"
#include "reprobench/config.hpp"
#include "reprobench/errors.hpp"
#include "reprobench/ingest.hpp"
#include "reprobench/report.hpp"
#include "reprobench/runner.hpp"
#include "reprobench/synth.hpp"
#include "reprobench/version.hpp"

namespace {

using namespace reprobench;
using nlohmann::json;
using nlohmann::ordered_json;

// Exit codes: 0 ok, 1 usage, 2 data, 3 zero successful protocols.
struct ExitWith {
  int code;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("parse error in '" + path.string() + "': " + e.what());
  }
  return j;
}

ordered_json robustness_report_json(const RobustnessReport& rep) {
  ordered_json j;
  j["dataset_id"] = rep.dataset_id;
  j["metric"] = rep.metric.str();
  j["robustness"] = rep.robustness;
  j["n_pdatasets"] = rep.n_pdatasets;
  j["n_skipped_pairs"] = rep.n_skipped_pairs;
  ordered_json pairs = ordered_json::array();
  for (const auto& pc : rep.pair_correlations) {
    ordered_json e;
    e["i"] = pc.protocol_i;
    e["j"] = pc.protocol_j;
    e["rho"] = pc.rho;
    pairs.push_back(e);
  }
  j["pairs"] = pairs;
  return j;
}

void add_ingest(CLI::App& app) {
  auto* cmd = app.add_subcommand("ingest", "Parse a rating log and write the canonical form");
  auto fmt = std::make_shared<std::string>("canonical");
  auto input = std::make_shared<std::string>();
  auto output = std::make_shared<std::string>();
  auto source_id = std::make_shared<std::string>();
  cmd->add_option("--format", *fmt, "ml-100k | ml-dat | ml-csv | canonical")->required();
  cmd->add_option("--input", *input, "input rating log")->required();
  cmd->add_option("--output", *output, "canonical output path");
  cmd->add_option("--source-id", *source_id, "override the dataset label");
  cmd->callback([=]() {
    auto d = parse_interactions(parse_format_name(*fmt), *input);
    if (!source_id->empty()) d.source_id = *source_id;
    const auto stats = dataset_stats(d);
    std::cout << "source_id=" << d.source_id << "\n"
              << "n_users=" << stats.n_users << "\n"
              << "n_items=" << stats.n_items << "\n"
              << "n_interactions=" << stats.n_interactions << "\n"
              << "density=" << stats.density << "\n"
              << "time_span=[" << stats.min_timestamp << ", " << stats.max_timestamp << "]\n";
    if (!output->empty()) {
      write_canonical(d, *output);
      std::cout << "wrote " << *output << "\n";
    }
  });
}

void add_synth(CLI::App& app) {
  auto* cmd = app.add_subcommand("synth", "Generate a seeded synthetic rating log");
  auto spec = std::make_shared<SynthSpec>();
  auto output = std::make_shared<std::string>();
  cmd->add_option("--users", spec->n_users, "number of users");
  cmd->add_option("--items", spec->n_items, "number of items");
  cmd->add_option("--skew", spec->popularity_skew, "Zipf popularity exponent");
  cmd->add_option("--taste-dim", spec->taste_dim, "latent factor dimension");
  cmd->add_option("--mean-events", spec->mean_events_per_user, "mean events per user");
  cmd->add_option("--noise", spec->rating_noise, "rating noise std");
  cmd->add_option("--seed", spec->seed, "generator seed");
  cmd->add_option("--source-id", spec->source_id, "dataset label");
  cmd->add_option("--output", *output, "canonical output path")->required();
  cmd->callback([=]() {
    const auto d = generate_synthetic(*spec);
    write_canonical(d, *output);
    const auto stats = dataset_stats(d);
    std::cout << "wrote " << *output << " (" << stats.n_interactions << " interactions, "
              << stats.n_users << " users, " << stats.n_items << " items)\n";
  });
}

void add_grid(CLI::App& app) {
  auto* cmd = app.add_subcommand("grid", "Enumerate the protocol grid of a config");
  auto config_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--config", *config_path, "run config (or bare grid) json")->required();
  cmd->add_option("--out", *out, "manifest output path");
  cmd->callback([=]() {
    json j = load_json(*config_path);
    const GridSpec g = grid_from_json(j.contains("grid") ? j["grid"] : j);
    const auto protocols = enumerate_grid(g);
    ordered_json manifest;
    manifest["n_protocols"] = protocols.size();
    ordered_json entries = ordered_json::array();
    for (std::size_t i = 0; i < protocols.size(); ++i) {
      ordered_json e;
      e["id"] = i;
      e["protocol"] = protocol_to_json(protocols[i]);
      entries.push_back(e);
    }
    manifest["protocols"] = entries;
    if (!out->empty()) {
      write_text(*out, manifest.dump(2) + "\n");
      std::cout << "wrote " << *out << " (" << protocols.size() << " protocols)\n";
    } else {
      std::cout << manifest.dump(2) << "\n";
    }
  });
}

void add_run(CLI::App& app) {
  auto* cmd = app.add_subcommand("run", "Run the full experiment grid");
  auto config_path = std::make_shared<std::string>();
  auto seed = std::make_shared<std::int64_t>(-1);
  auto parallelism = std::make_shared<std::int64_t>(-1);
  auto output_dir = std::make_shared<std::string>();
  cmd->add_option("--config", *config_path, "run config json")->required();
  cmd->add_option("--seed", *seed, "override master_seed");
  cmd->add_option("--parallelism", *parallelism, "worker threads (0 = auto)");
  cmd->add_option("--output-dir", *output_dir, "override output directory");
  cmd->callback([=]() {
    RunConfig config = load_run_config(*config_path);
    if (*seed >= 0) config.master_seed = static_cast<std::uint64_t>(*seed);
    if (*parallelism >= 0) config.parallelism = static_cast<std::uint64_t>(*parallelism);
    if (!output_dir->empty()) config.output_dir = *output_dir;
    const auto results = run_experiment(config);
    write_run_results(results, config.output_dir);
    std::cout << "protocols ok: " << results.n_ok() << "/" << results.protocols.size() << "\n";
    for (const auto& p : results.protocols)
      if (!p.ok) std::cout << "  skipped protocol " << p.id << ": " << p.skip_reason << "\n";
    std::cout << "wrote " << (config.output_dir / "results.json").string() << "\n";
    if (results.n_ok() == 0) {
      std::cerr << "error: zero successful protocols\n";
      throw ExitWith{3};
    }
  });
}

void add_robustness(CLI::App& app) {
  auto* cmd = app.add_subcommand("robustness", "Robustness of a results file under one metric");
  auto results_path = std::make_shared<std::string>();
  auto metric = std::make_shared<std::string>("precision@10");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--results", *results_path, "results.json from a run")->required();
  cmd->add_option("--metric", *metric, "metric id, e.g. ndcg@10")->required();
  cmd->add_option("--out", *out, "report output path");
  cmd->callback([=]() {
    const auto r = read_run_results(*results_path);
    const auto rep = robustness_from_results(r, MetricId::parse(*metric));
    std::cout << "robustness(" << rep.dataset_id << ", " << rep.metric.str()
              << ") = " << rep.robustness << "  [" << rep.pair_correlations.size()
              << " pairs, " << rep.n_skipped_pairs << " skipped]\n";
    if (!out->empty()) write_text(*out, robustness_report_json(rep).dump(2) + "\n");
  });
}

void add_signature(CLI::App& app) {
  auto* cmd = app.add_subcommand("signature", "Extract p-dataset signatures from results");
  auto results_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--results", *results_path, "results.json from a run")->required();
  cmd->add_option("--out", *out, "signatures output path")->required();
  cmd->callback([=]() {
    const auto r = read_run_results(*results_path);
    const auto sigs = signatures_from_results(r);
    write_signatures_file(sigs, r.metric_order, r.algo_order, r.source_id, *out);
    std::cout << "wrote " << *out << " (" << sigs.size() << " signatures)\n";
  });
}

void add_select(CLI::App& app) {
  auto* cmd = app.add_subcommand("select", "Nearest-neighbor protocol selection");
  auto target_path = std::make_shared<std::string>();
  auto target_id = std::make_shared<std::int64_t>(-1);
  auto pool_path = std::make_shared<std::string>();
  auto zscore = std::make_shared<bool>(false);
  cmd->add_option("--target", *target_path, "signatures file holding the target")->required();
  cmd->add_option("--target-id", *target_id, "protocol id inside the target file");
  cmd->add_option("--pool", *pool_path, "signatures file holding the candidate pool")->required();
  cmd->add_flag("--zscore", *zscore, "z-score signature coordinates with pool statistics");
  cmd->callback([=]() {
    const auto target_file = read_signatures_file(*target_path);
    const auto pool_file = read_signatures_file(*pool_path);
    const Signature* target = nullptr;
    if (*target_id >= 0) {
      for (const auto& [id, sig] : target_file.signatures)
        if (id == static_cast<std::uint64_t>(*target_id)) target = &sig;
      if (!target) throw DataError("target id not present in the target file");
    } else {
      if (target_file.signatures.size() != 1)
        throw ConfigError("target file has several signatures; pass --target-id");
      target = &target_file.signatures[0].second;
    }
    const auto sel = select_protocol(*target, pool_file.signatures, *zscore);
    std::cout << "protocol " << sel.protocol_id << " distance " << sel.distance << "\n";
  });
}

void add_embed(CLI::App& app) {
  auto* cmd = app.add_subcommand("embed", "2-D embedding of signature files");
  auto sig_paths = std::make_shared<std::vector<std::string>>();
  auto method = std::make_shared<std::string>("pca");
  auto seed = std::make_shared<std::uint64_t>(0);
  auto out = std::make_shared<std::string>();
  cmd->add_option("--signatures", *sig_paths, "signature file(s)")->required()->expected(-1);
  cmd->add_option("--method", *method, "pca | tsne");
  cmd->add_option("--seed", *seed, "embedding seed");
  cmd->add_option("--out", *out, "coordinates csv path")->required();
  cmd->callback([=]() {
    std::vector<Signature> sigs;
    std::vector<std::string> dataset_of_point;
    std::vector<std::uint64_t> ids;
    for (const auto& path : *sig_paths) {
      const auto f = read_signatures_file(path);
      for (const auto& [id, sig] : f.signatures) {
        sigs.push_back(sig);
        dataset_of_point.push_back(f.dataset_id);
        ids.push_back(id);
      }
    }
    const auto coords = embed_2d(sigs, parse_embed_method(*method), *seed);
    std::ostringstream csv;
    csv << "dataset,protocol_id,x,y\n";
    for (std::size_t i = 0; i < coords.size(); ++i)
      csv << dataset_of_point[i] << ',' << ids[i] << ',' << coords[i][0] << ',' << coords[i][1]
          << "\n";
    write_text(*out, csv.str());
    std::cout << "wrote " << *out << " (" << coords.size() << " points)\n";
  });
}

void add_report(CLI::App& app) {
  auto* cmd = app.add_subcommand("report", "Emit figure-style data files and renderings");
  auto results_paths = std::make_shared<std::vector<std::string>>();
  auto metric = std::make_shared<std::string>("precision@10");
  auto method = std::make_shared<std::string>("pca");
  auto seed = std::make_shared<std::uint64_t>(0);
  auto out_dir = std::make_shared<std::string>();
  cmd->add_option("--results", *results_paths, "results.json file(s)")->required()->expected(-1);
  cmd->add_option("--metric", *metric, "metric for the score/flip tables");
  cmd->add_option("--embed-method", *method, "pca | tsne");
  cmd->add_option("--embed-seed", *seed, "embedding seed");
  cmd->add_option("--out-dir", *out_dir, "report output directory")->required();
  cmd->callback([=]() {
    std::vector<RunResults> runs;
    for (const auto& p : *results_paths) runs.push_back(read_run_results(p));
    const auto metric_id = MetricId::parse(*metric);
    write_report(runs, metric_id, parse_embed_method(*method), *seed, *out_dir);
    for (const auto& r : runs) {
      const auto flips = find_ranking_flips(r, metric_id);
      if (flips.empty()) {
        std::cout << r.source_id << ": no ranking flips under " << *metric << "\n";
      } else {
        std::cout << r.source_id << ": " << flips.size() << " ranking flip(s) under " << *metric
                  << "; strongest: protocols " << flips[0].protocol_a << " vs "
                  << flips[0].protocol_b << " (rho=" << flips[0].rho << ", top '"
                  << flips[0].top_a << "' vs '" << flips[0].top_b << "')\n";
      }
    }
    std::cout << "wrote report to " << *out_dir << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) + " " + kToolVersion +
               " - preprocessing-robustness benchmark for recommender evaluation"};
  app.require_subcommand(1);

  add_ingest(app);
  add_synth(app);
  add_grid(app);
  add_run(app);
  add_robustness(app);
  add_signature(app);
  add_select(app);
  add_embed(app);
  add_report(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ExitWith& e) {
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

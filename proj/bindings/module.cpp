#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "json.hpp"

#include "reprobench/analysis.hpp"
#include "reprobench/config.hpp"
#include "reprobench/errors.hpp"
#include "reprobench/ingest.hpp"
#include "reprobench/metrics.hpp"
#include "reprobench/protocol.hpp"
#include "reprobench/report.hpp"
#include "reprobench/runner.hpp"
#include "reprobench/stats.hpp"
#include "reprobench/synth.hpp"
#include "reprobench/version.hpp"

namespace py = pybind11;
using namespace reprobench;

namespace {

RawDataset parse_py(const std::string& format, const std::filesystem::path& path) {
  return parse_interactions(parse_format_name(format), path);
}

RawDataset synth_py(std::uint64_t n_users, std::uint64_t n_items, double popularity_skew,
                    std::uint64_t taste_dim, double mean_events_per_user, double rating_noise,
                    std::uint64_t seed, const std::string& source_id) {
  SynthSpec spec{n_users, n_items, popularity_skew, taste_dim,
                 mean_events_per_user, rating_noise, seed, source_id};
  return generate_synthetic(spec);
}

Protocol protocol_py(const std::string& protocol_json) {
  return protocol_from_json(nlohmann::json::parse(protocol_json));
}

RankedList recommend_py(const RecModel& m, const std::vector<std::uint64_t>& input,
                        std::uint64_t k) {
  return m.recommend(input, k);
}

std::string run_experiment_py(const std::filesystem::path& config_path) {
  const RunConfig config = load_run_config(config_path);
  const auto results = run_experiment(config);
  write_run_results(results, config.output_dir);
  return run_results_to_json(results).dump(2);
}

double robustness_py(const std::vector<std::vector<double>>& vectors) {
  std::vector<PerformanceVector> pv;
  pv.reserve(vectors.size());
  for (const auto& v : vectors) pv.push_back({MetricId{}, v});
  return robustness(pv, "adhoc").robustness;
}

std::pair<std::uint64_t, double> select_py(const std::vector<double>& target,
                                           const std::vector<std::vector<double>>& pool) {
  if (pool.empty()) throw DataError("empty signature pool");
  Signature t{target, {}, {}};
  std::vector<std::pair<std::uint64_t, Signature>> p;
  for (std::size_t i = 0; i < pool.size(); ++i)
    p.emplace_back(i, Signature{pool[i], {}, {}});
  const auto sel = select_protocol(t, p);
  return {sel.protocol_id, sel.distance};
}

std::vector<std::array<double, 2>> embed_py(const std::vector<std::vector<double>>& points,
                                            const std::string& method, std::uint64_t seed) {
  std::vector<Signature> sigs;
  sigs.reserve(points.size());
  for (const auto& v : points) sigs.push_back({v, {}, {}});
  return embed_2d(sigs, parse_embed_method(method), seed);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Preprocessing-robustness benchmark core";
  m.attr("__version__") = kToolVersion;

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<Interaction>(m, "Interaction")
      .def_readonly("user_id", &Interaction::user_id)
      .def_readonly("item_id", &Interaction::item_id)
      .def_readonly("rating", &Interaction::rating)
      .def_readonly("timestamp", &Interaction::timestamp);

  py::class_<RawDataset>(m, "RawDataset")
      .def_readonly("interactions", &RawDataset::interactions)
      .def_readonly("source_id", &RawDataset::source_id)
      .def("__len__", [](const RawDataset& d) { return d.interactions.size(); });

  py::class_<Session>(m, "Session")
      .def_readonly("user_id", &Session::user_id)
      .def("items", [](const Session& s) {
        std::vector<std::uint64_t> out;
        for (const auto& e : s.events) out.push_back(e.item_id);
        return out;
      });

  py::class_<PDataset>(m, "PDataset")
      .def_readonly("train_sessions", &PDataset::train_sessions)
      .def_readonly("source_id", &PDataset::source_id)
      .def_property_readonly("n_items", &PDataset::n_items)
      .def_property_readonly("n_train_sessions",
                             [](const PDataset& d) { return d.train_sessions.size(); })
      .def_property_readonly("n_test_pairs",
                             [](const PDataset& d) { return d.test_pairs.size(); })
      .def("test_pair", [](const PDataset& d, std::size_t i) {
        const auto& tp = d.test_pairs.at(i);
        std::vector<std::uint64_t> input;
        for (const auto& e : tp.input.events) input.push_back(e.item_id);
        return std::make_pair(input, tp.output);
      });

  py::class_<RankedList>(m, "RankedList")
      .def_readonly("items", &RankedList::items)
      .def_readonly("scores", &RankedList::scores);

  py::class_<RecModel>(m, "RecModel")
      .def("recommend", &recommend_py, py::arg("input"), py::arg("k"));

  m.def("parse_interactions", &parse_py, py::arg("format"), py::arg("path"));
  m.def("write_canonical", &write_canonical, py::arg("dataset"), py::arg("path"));
  m.def("read_canonical", &read_canonical, py::arg("path"));
  m.def("dataset_stats", [](const RawDataset& d) {
    const auto s = dataset_stats(d);
    py::dict out;
    out["n_users"] = s.n_users;
    out["n_items"] = s.n_items;
    out["n_interactions"] = s.n_interactions;
    out["density"] = s.density;
    out["time_span"] = py::make_tuple(s.min_timestamp, s.max_timestamp);
    return out;
  });

  m.def("generate_synthetic", &synth_py, py::arg("n_users") = 100, py::arg("n_items") = 50,
        py::arg("popularity_skew") = 1.0, py::arg("taste_dim") = 8,
        py::arg("mean_events_per_user") = 20.0, py::arg("rating_noise") = 0.5,
        py::arg("seed") = 0, py::arg("source_id") = "synthetic");

  m.def(
      "build_pdataset",
      [](const RawDataset& d, const std::string& protocol_json) {
        return build_pdataset(d, protocol_py(protocol_json));
      },
      py::arg("dataset"), py::arg("protocol_json"));

  m.def(
      "fit",
      [](const std::string& algo_json, const PDataset& d) {
        return fit(algo_spec_from_json(nlohmann::json::parse(algo_json)), train_view(d));
      },
      py::arg("algo_json"), py::arg("pdataset"));

  m.def(
      "precision_at_k",
      [](const std::vector<std::uint64_t>& rec, std::vector<std::uint64_t> rel,
         std::uint64_t k) {
        std::sort(rel.begin(), rel.end());
        RankedList list{rec, std::vector<double>(rec.size(), 0.0)};
        return precision_at_k(list, rel, k);
      },
      py::arg("recommended"), py::arg("relevant"), py::arg("k"));
  m.def(
      "ndcg_at_k",
      [](const std::vector<std::uint64_t>& rec, std::vector<std::uint64_t> rel,
         std::uint64_t k) {
        std::sort(rel.begin(), rel.end());
        RankedList list{rec, std::vector<double>(rec.size(), 0.0)};
        return ndcg_at_k(list, rel, k);
      },
      py::arg("recommended"), py::arg("relevant"), py::arg("k"));

  m.def("rank_average_ties",
        [](const std::vector<double>& v) { return rank_average_ties(v); });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
    return spearman(x, y);
  });
  m.def("percentile_linear", [](const std::vector<double>& v, double p) {
    return percentile_linear(v, p);
  });
  m.def(
      "bootstrap_std_ci",
      [](const std::vector<double>& v, std::uint64_t n_boot, std::uint64_t seed) {
        const auto r = bootstrap_std_ci(v, n_boot, seed);
        return std::make_pair(r.mean, r.stdev);
      },
      py::arg("values"), py::arg("n_boot") = 100, py::arg("seed") = 0);

  m.def("robustness", &robustness_py, py::arg("performance_vectors"),
        "5th percentile of pairwise Spearman correlations");
  m.def("select_protocol", &select_py, py::arg("target"), py::arg("pool"));
  m.def("embed_2d", &embed_py, py::arg("points"), py::arg("method") = "pca",
        py::arg("seed") = 0);

  m.def("run_experiment", &run_experiment_py, py::arg("config_path"),
        "Run a full config; writes results and returns them as a json string");
}

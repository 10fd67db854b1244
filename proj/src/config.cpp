#include "reprobench/config.hpp"

#include <fstream>
#include <set>
#include <unordered_set>

#include "reprobench/errors.hpp"

namespace reprobench {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

json as_list(const json& j) {
  if (j.is_array()) return j;
  json arr = json::array();
  arr.push_back(j);
  return arr;
}

template <typename T>
std::vector<T> number_list(const json& j, const std::string& key) {
  std::vector<T> out;
  for (const auto& v : as_list(j)) {
    if (!v.is_number()) throw ConfigError("grid." + key + ": expected numbers");
    out.push_back(v.get<T>());
  }
  return out;
}

template <typename T>
std::vector<std::optional<T>> optional_number_list(const json& j, const std::string& key) {
  std::vector<std::optional<T>> out;
  for (const auto& v : as_list(j)) {
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "none")) {
      out.push_back(std::nullopt);
    } else if (v.is_number()) {
      out.push_back(v.get<T>());
    } else {
      throw ConfigError("grid." + key + ": expected numbers, null, or \"none\"");
    }
  }
  return out;
}

std::vector<std::string> string_list(const json& j, const std::string& key) {
  std::vector<std::string> out;
  for (const auto& v : as_list(j)) {
    if (!v.is_string()) throw ConfigError(key + ": expected strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

GridSpec grid_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("grid must be an object");
  check_keys(j,
             {"rating_threshold", "min_user_interactions", "min_item_interactions",
              "max_interactions_per_user", "max_users", "session_gap", "n_output_items",
              "output_strategy", "test_fraction", "split_strategy", "seed", "kcore_iterate",
              "grid_cap"},
             "grid");
  GridSpec g;
  if (j.contains("rating_threshold"))
    g.rating_threshold = number_list<double>(j["rating_threshold"], "rating_threshold");
  if (j.contains("min_user_interactions"))
    g.min_user_interactions =
        number_list<std::uint64_t>(j["min_user_interactions"], "min_user_interactions");
  if (j.contains("min_item_interactions"))
    g.min_item_interactions =
        number_list<std::uint64_t>(j["min_item_interactions"], "min_item_interactions");
  if (j.contains("max_interactions_per_user"))
    g.max_interactions_per_user = optional_number_list<std::uint64_t>(
        j["max_interactions_per_user"], "max_interactions_per_user");
  if (j.contains("max_users"))
    g.max_users = optional_number_list<std::uint64_t>(j["max_users"], "max_users");
  if (j.contains("session_gap"))
    g.session_gap = optional_number_list<std::int64_t>(j["session_gap"], "session_gap");
  if (j.contains("n_output_items"))
    g.n_output_items = number_list<std::uint64_t>(j["n_output_items"], "n_output_items");
  if (j.contains("output_strategy")) {
    g.output_strategy.clear();
    for (const auto& s : string_list(j["output_strategy"], "grid.output_strategy"))
      g.output_strategy.push_back(parse_output_strategy(s));
  }
  if (j.contains("test_fraction"))
    g.test_fraction = number_list<double>(j["test_fraction"], "test_fraction");
  if (j.contains("split_strategy")) {
    g.split_strategy.clear();
    for (const auto& s : string_list(j["split_strategy"], "grid.split_strategy"))
      g.split_strategy.push_back(parse_split_strategy(s));
  }
  if (j.contains("seed")) g.seed = number_list<std::uint64_t>(j["seed"], "seed");
  if (j.contains("kcore_iterate")) {
    if (!j["kcore_iterate"].is_boolean()) throw ConfigError("grid.kcore_iterate must be a bool");
    g.kcore_iterate = j["kcore_iterate"].get<bool>();
  }
  if (j.contains("grid_cap")) g.grid_cap = j["grid_cap"].get<std::uint64_t>();

  for (std::uint64_t v : g.n_output_items)
    if (v == 0) throw ConfigError("grid.n_output_items values must be >= 1");
  for (double f : g.test_fraction)
    if (f <= 0.0 || f >= 1.0) throw ConfigError("grid.test_fraction values must be in (0, 1)");
  return g;
}

ordered_json grid_to_json(const GridSpec& g) {
  ordered_json j;
  j["rating_threshold"] = g.rating_threshold;
  j["min_user_interactions"] = g.min_user_interactions;
  j["min_item_interactions"] = g.min_item_interactions;
  auto opt_list = [](const auto& values) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : values) {
      if (v)
        arr.push_back(*v);
      else
        arr.push_back(nullptr);
    }
    return arr;
  };
  j["max_interactions_per_user"] = opt_list(g.max_interactions_per_user);
  j["max_users"] = opt_list(g.max_users);
  j["session_gap"] = opt_list(g.session_gap);
  j["n_output_items"] = g.n_output_items;
  {
    ordered_json arr = ordered_json::array();
    for (auto s : g.output_strategy) arr.push_back(output_strategy_name(s));
    j["output_strategy"] = arr;
  }
  j["test_fraction"] = g.test_fraction;
  {
    ordered_json arr = ordered_json::array();
    for (auto s : g.split_strategy) arr.push_back(split_strategy_name(s));
    j["split_strategy"] = arr;
  }
  j["seed"] = g.seed;
  j["kcore_iterate"] = g.kcore_iterate;
  j["grid_cap"] = g.grid_cap;
  return j;
}

AlgoSpec algo_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("algorithm entries need a 'kind'");
  AlgoSpec spec;
  spec.kind = parse_algo_kind(j["kind"].get<std::string>());

  std::set<std::string> allowed = {"kind", "name", "seed"};
  switch (spec.kind) {
    case AlgoKind::ItemKnn:
      allowed.insert("n_neighbors");
      break;
    case AlgoKind::Svd:
      allowed.insert({"rank", "n_power_iterations", "oversampling"});
      break;
    case AlgoKind::Mlp:
      allowed.insert({"hidden_dim", "epochs", "learning_rate", "batch_size"});
      break;
    default:
      break;
  }
  check_keys(j, allowed, "algorithm '" + algo_kind_name(spec.kind) + "'");

  spec.name = j.value("name", algo_kind_name(spec.kind));
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.n_neighbors = j.value("n_neighbors", spec.n_neighbors);
  spec.rank = j.value("rank", spec.rank);
  spec.n_power_iterations = j.value("n_power_iterations", spec.n_power_iterations);
  spec.oversampling = j.value("oversampling", spec.oversampling);
  spec.hidden_dim = j.value("hidden_dim", spec.hidden_dim);
  spec.epochs = j.value("epochs", spec.epochs);
  spec.learning_rate = j.value("learning_rate", spec.learning_rate);
  spec.batch_size = j.value("batch_size", spec.batch_size);

  if (spec.n_neighbors == 0 || spec.rank == 0 || spec.hidden_dim == 0 || spec.epochs == 0 ||
      spec.batch_size == 0 || spec.learning_rate <= 0.0)
    throw ConfigError("algorithm '" + spec.name + "': hyperparameters must be positive");
  return spec;
}

ordered_json protocol_to_json(const Protocol& p) {
  ordered_json j;
  j["rating_threshold"] = p.rating_threshold;
  j["min_user_interactions"] = p.min_user_interactions;
  j["min_item_interactions"] = p.min_item_interactions;
  j["max_interactions_per_user"] =
      p.max_interactions_per_user ? ordered_json(*p.max_interactions_per_user) : ordered_json();
  j["max_users"] = p.max_users ? ordered_json(*p.max_users) : ordered_json();
  j["session_gap"] = p.session_gap ? ordered_json(*p.session_gap) : ordered_json();
  j["n_output_items"] = p.n_output_items;
  j["output_strategy"] = output_strategy_name(p.output_strategy);
  j["test_fraction"] = p.test_fraction;
  j["split_strategy"] = split_strategy_name(p.split_strategy);
  j["seed"] = p.seed;
  j["kcore_iterate"] = p.kcore_iterate;
  return j;
}

Protocol protocol_from_json(const json& j) {
  check_keys(j,
             {"rating_threshold", "min_user_interactions", "min_item_interactions",
              "max_interactions_per_user", "max_users", "session_gap", "n_output_items",
              "output_strategy", "test_fraction", "split_strategy", "seed", "kcore_iterate"},
             "protocol");
  Protocol p;
  p.rating_threshold = j.value("rating_threshold", p.rating_threshold);
  p.min_user_interactions = j.value("min_user_interactions", p.min_user_interactions);
  p.min_item_interactions = j.value("min_item_interactions", p.min_item_interactions);
  auto opt_u64 = [&](const char* key) -> std::optional<std::uint64_t> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::uint64_t>();
  };
  auto opt_i64 = [&](const char* key) -> std::optional<std::int64_t> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::int64_t>();
  };
  p.max_interactions_per_user = opt_u64("max_interactions_per_user");
  p.max_users = opt_u64("max_users");
  p.session_gap = opt_i64("session_gap");
  p.n_output_items = j.value("n_output_items", p.n_output_items);
  if (j.contains("output_strategy"))
    p.output_strategy = parse_output_strategy(j["output_strategy"].get<std::string>());
  p.test_fraction = j.value("test_fraction", p.test_fraction);
  if (j.contains("split_strategy"))
    p.split_strategy = parse_split_strategy(j["split_strategy"].get<std::string>());
  p.seed = j.value("seed", p.seed);
  p.kcore_iterate = j.value("kcore_iterate", p.kcore_iterate);
  return p;
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j,
             {"dataset", "grid", "algorithms", "metrics", "n_boot", "master_seed", "output_dir",
              "parallelism"},
             "config");
  if (!j.contains("dataset") || !j.contains("grid") || !j.contains("algorithms") ||
      !j.contains("metrics"))
    throw ConfigError("config needs dataset, grid, algorithms, and metrics");

  RunConfig c;
  const auto& ds = j["dataset"];
  check_keys(ds, {"path", "format"}, "dataset");
  if (!ds.contains("path")) throw ConfigError("dataset.path is required");
  c.dataset_path = std::filesystem::path(ds["path"].get<std::string>());
  if (c.dataset_path.is_relative()) c.dataset_path = base_dir / c.dataset_path;
  c.format = parse_format_name(ds.value("format", std::string("canonical")));

  c.grid = grid_from_json(j["grid"]);

  std::unordered_set<std::string> names;
  for (const auto& a : j["algorithms"]) {
    auto spec = algo_spec_from_json(a);
    if (!names.insert(spec.name).second)
      throw ConfigError("duplicate algorithm name '" + spec.name +
                        "' (give distinct 'name' values)");
    c.algorithms.push_back(std::move(spec));
  }
  if (c.algorithms.empty()) throw ConfigError("algorithm pool is empty");

  std::set<MetricId> seen;
  for (const auto& m : string_list(j["metrics"], "metrics")) {
    const auto id = MetricId::parse(m);
    if (!seen.insert(id).second) throw ConfigError("duplicate metric id '" + m + "'");
    c.metrics.push_back(id);
  }
  if (c.metrics.empty()) throw ConfigError("metric pool is empty");

  c.n_boot = j.value("n_boot", std::uint64_t{100});
  if (c.n_boot < 2) throw ConfigError("n_boot must be >= 2");
  c.master_seed = j.value("master_seed", std::uint64_t{0});
  c.output_dir = std::filesystem::path(j.value("output_dir", std::string("out")));
  if (c.output_dir.is_relative()) c.output_dir = base_dir / c.output_dir;
  if (j.contains("parallelism")) {
    const auto& p = j["parallelism"];
    if (p.is_string() && p.get<std::string>() == "auto")
      c.parallelism = 0;
    else if (p.is_number_unsigned())
      c.parallelism = p.get<std::uint64_t>();
    else
      throw ConfigError("parallelism must be a count or \"auto\"");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in '" + path.string() + "': " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

std::string config_hash(const json& j) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

}  // namespace reprobench

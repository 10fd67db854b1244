#include "reprobench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"
#include "reprobench/stats.hpp"

namespace reprobench {

namespace {

std::string family_name(MetricFamily f) {
  switch (f) {
    case MetricFamily::Precision:
      return "precision";
    case MetricFamily::Recall:
      return "recall";
    case MetricFamily::Mrr:
      return "mrr";
    case MetricFamily::Ndcg:
      return "ndcg";
    case MetricFamily::ItemCoverage:
      return "item_coverage";
    case MetricFamily::Apt:
      return "apt";
  }
  return "?";
}

MetricFamily parse_family(const std::string& name) {
  if (name == "precision") return MetricFamily::Precision;
  if (name == "recall") return MetricFamily::Recall;
  if (name == "mrr") return MetricFamily::Mrr;
  if (name == "ndcg") return MetricFamily::Ndcg;
  if (name == "item_coverage") return MetricFamily::ItemCoverage;
  if (name == "apt") return MetricFamily::Apt;
  throw ConfigError("unknown metric family '" + name + "'");
}

bool is_relevant(std::span<const std::uint64_t> rel, std::uint64_t item) {
  return std::binary_search(rel.begin(), rel.end(), item);
}

std::uint64_t check_rel(std::span<const std::uint64_t> rel) {
  if (rel.empty()) throw DataError("no relevant items");
  return rel.size();
}

std::size_t top_len(const RankedList& rec, std::uint64_t k) {
  if (k == 0) throw DataError("k must be >= 1");
  return std::min<std::size_t>(rec.items.size(), k);
}

}  // namespace

std::string MetricId::str() const {
  return family_name(family) + "@" + std::to_string(k);
}

MetricId MetricId::parse(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos || at + 1 >= text.size())
    throw ConfigError("metric id must look like 'family@k', got '" + text + "'");
  MetricId id;
  id.family = parse_family(text.substr(0, at));
  try {
    id.k = std::stoull(text.substr(at + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad k in metric id '" + text + "'");
  }
  if (id.k == 0) throw ConfigError("metric k must be >= 1");
  return id;
}

bool is_set_level(MetricFamily f) {
  return f == MetricFamily::ItemCoverage;
}

EvalContext EvalContext::from_train(std::span<const Session> train_sessions,
                                    std::uint64_t n_items, double head_share) {
  EvalContext ctx;
  ctx.n_items = n_items;
  ctx.popularity.assign(n_items, 0);
  std::uint64_t total = 0;
  for (const auto& s : train_sessions) {
    for (const auto& e : s.events) {
      ++ctx.popularity[e.item_id];
      ++total;
    }
  }
  // Head: smallest popularity-sorted prefix reaching head_share of the train
  // interactions; long tail is the complement.
  std::vector<std::uint32_t> order(n_items);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return ctx.popularity[a] > ctx.popularity[b] ||
           (ctx.popularity[a] == ctx.popularity[b] && a < b);
  });
  ctx.long_tail.assign(n_items, true);
  const double target = head_share * static_cast<double>(total);
  double cum = 0.0;
  for (auto item : order) {
    if (cum >= target) break;
    ctx.long_tail[item] = false;
    cum += static_cast<double>(ctx.popularity[item]);
  }
  return ctx;
}

double precision_at_k(const RankedList& rec, std::span<const std::uint64_t> rel,
                      std::uint64_t k) {
  check_rel(rel);
  const std::size_t len = top_len(rec, k);
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < len; ++i)
    if (is_relevant(rel, rec.items[i])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double recall_at_k(const RankedList& rec, std::span<const std::uint64_t> rel, std::uint64_t k) {
  const std::uint64_t n_rel = check_rel(rel);
  const std::size_t len = top_len(rec, k);
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < len; ++i)
    if (is_relevant(rel, rec.items[i])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(n_rel);
}

double mrr_at_k(const RankedList& rec, std::span<const std::uint64_t> rel, std::uint64_t k) {
  check_rel(rel);
  const std::size_t len = top_len(rec, k);
  for (std::size_t i = 0; i < len; ++i)
    if (is_relevant(rel, rec.items[i])) return 1.0 / static_cast<double>(i + 1);
  return 0.0;
}

double ndcg_at_k(const RankedList& rec, std::span<const std::uint64_t> rel, std::uint64_t k) {
  const std::uint64_t n_rel = check_rel(rel);
  const std::size_t len = top_len(rec, k);
  double dcg = 0.0;
  for (std::size_t i = 0; i < len; ++i)
    if (is_relevant(rel, rec.items[i]))
      dcg += 1.0 / std::log2(static_cast<double>(i + 2));
  const std::uint64_t ideal_hits = std::min<std::uint64_t>(n_rel, k);
  double idcg = 0.0;
  for (std::uint64_t i = 0; i < ideal_hits; ++i)
    idcg += 1.0 / std::log2(static_cast<double>(i + 2));
  return idcg == 0.0 ? 0.0 : dcg / idcg;
}

double item_coverage_at_k(std::span<const RankedList> all_recs, const EvalContext& ctx,
                          std::uint64_t k) {
  if (ctx.n_items == 0) throw DataError("empty catalog");
  std::vector<bool> seen(ctx.n_items, false);
  for (const auto& rec : all_recs) {
    const std::size_t len = top_len(rec, k);
    for (std::size_t i = 0; i < len; ++i) seen[rec.items[i]] = true;
  }
  std::uint64_t covered = 0;
  for (bool b : seen) covered += b ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(ctx.n_items);
}

double apt_at_k(std::span<const RankedList> all_recs, const EvalContext& ctx, std::uint64_t k) {
  bool any_tail = false;
  for (bool b : ctx.long_tail) any_tail = any_tail || b;
  if (!any_tail) throw DataError("degenerate long-tail definition");
  if (all_recs.empty()) throw DataError("no recommendations");
  double sum = 0.0;
  for (const auto& rec : all_recs) {
    const std::size_t len = top_len(rec, k);
    std::uint64_t tail_hits = 0;
    for (std::size_t i = 0; i < len; ++i)
      if (ctx.long_tail[rec.items[i]]) ++tail_hits;
    sum += static_cast<double>(tail_hits) / static_cast<double>(k);
  }
  return sum / static_cast<double>(all_recs.size());
}

const MetricEntry& MetricTable::at(const MetricId& m, const std::string& algo) const {
  for (std::size_t i = 0; i < metric_order.size(); ++i) {
    if (!(metric_order[i] == m)) continue;
    for (std::size_t j = 0; j < algo_order.size(); ++j)
      if (algo_order[j] == algo) return entries[i][j];
  }
  throw DataError("missing entry " + m.str() + " / " + algo);
}

std::vector<MetricEntry> evaluate_model(const PDataset& d, const RecModel& model,
                                        std::span<const MetricId> metric_ids,
                                        std::uint64_t n_boot, std::uint64_t seed) {
  if (d.test_pairs.empty()) throw DataError("no valid test pairs");
  if (metric_ids.empty()) throw DataError("empty metric pool");

  std::uint64_t k_max = 1;
  for (const auto& m : metric_ids) k_max = std::max(k_max, m.k);

  const auto ctx = EvalContext::from_train(d.train_sessions, d.n_items());
  bool any_tail = false;
  for (bool b : ctx.long_tail) any_tail = any_tail || b;

  std::vector<RankedList> recs;
  recs.reserve(d.test_pairs.size());
  std::vector<std::uint64_t> input;
  for (const auto& tp : d.test_pairs) {
    input.clear();
    for (const auto& e : tp.input.events) input.push_back(e.item_id);
    recs.push_back(model.recommend(input, k_max));
  }
  const std::uint64_t n_pairs = recs.size();

  std::vector<MetricEntry> out;
  out.reserve(metric_ids.size());
  std::vector<double> per_pair(n_pairs);
  for (const auto& metric : metric_ids) {
    if (metric.family == MetricFamily::ItemCoverage) {
      const double value = item_coverage_at_k(recs, ctx, metric.k);
      const auto resampled = bootstrap_stat_values(
          n_pairs, n_boot, seed, [&](std::span<const std::uint32_t> idx) {
            std::vector<bool> seen(ctx.n_items, false);
            for (auto t : idx) {
              const auto& rec = recs[t];
              const std::size_t len = std::min<std::size_t>(rec.items.size(), metric.k);
              for (std::size_t i = 0; i < len; ++i) seen[rec.items[i]] = true;
            }
            std::uint64_t covered = 0;
            for (bool b : seen) covered += b ? 1 : 0;
            return static_cast<double>(covered) / static_cast<double>(ctx.n_items);
          });
      out.push_back({value, stdev_of(resampled)});
      continue;
    }
    for (std::uint64_t t = 0; t < n_pairs; ++t) {
      const auto& rec = recs[t];
      const auto& rel = d.test_pairs[t].output;
      switch (metric.family) {
        case MetricFamily::Precision:
          per_pair[t] = precision_at_k(rec, rel, metric.k);
          break;
        case MetricFamily::Recall:
          per_pair[t] = recall_at_k(rec, rel, metric.k);
          break;
        case MetricFamily::Mrr:
          per_pair[t] = mrr_at_k(rec, rel, metric.k);
          break;
        case MetricFamily::Ndcg:
          per_pair[t] = ndcg_at_k(rec, rel, metric.k);
          break;
        case MetricFamily::Apt: {
          if (!any_tail) throw DataError("degenerate long-tail definition");
          std::uint64_t tail_hits = 0;
          const std::size_t len = std::min<std::size_t>(rec.items.size(), metric.k);
          for (std::size_t i = 0; i < len; ++i)
            if (ctx.long_tail[rec.items[i]]) ++tail_hits;
          per_pair[t] = static_cast<double>(tail_hits) / static_cast<double>(metric.k);
          break;
        }
        default:
          break;
      }
    }
    const auto boot = bootstrap_std_ci(per_pair, n_boot, seed);
    out.push_back({boot.mean, boot.stdev});
  }
  return out;
}

MetricTable evaluate_all(const PDataset& d, std::span<const RecModel> models,
                         std::span<const MetricId> metric_ids, std::uint64_t n_boot,
                         std::uint64_t seed) {
  if (models.empty()) throw DataError("empty algorithm pool");
  MetricTable t;
  t.metric_order.assign(metric_ids.begin(), metric_ids.end());
  t.n_test_pairs = d.test_pairs.size();
  t.entries.assign(metric_ids.size(), {});
  for (auto& row : t.entries) row.resize(models.size());
  for (std::size_t a = 0; a < models.size(); ++a) {
    t.algo_order.push_back(models[a].spec().name.empty() ? algo_kind_name(models[a].spec().kind)
                                                         : models[a].spec().name);
    const auto column = evaluate_model(d, models[a], metric_ids, n_boot,
                                       rng::derive(seed, {static_cast<std::uint64_t>(a)}));
    for (std::size_t m = 0; m < metric_ids.size(); ++m) t.entries[m][a] = column[m];
  }
  return t;
}

}  // namespace reprobench

#include "reprobench/analysis.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "reprobench/errors.hpp"
#include "reprobench/stats.hpp"
#include "reprobench/tsne.hpp"

namespace reprobench {

PerformanceVector performance_vector(const MetricTable& t, const MetricId& metric,
                                     std::span<const std::string> algo_order) {
  PerformanceVector out;
  out.metric = metric;
  out.scores.reserve(algo_order.size());
  for (const auto& algo : algo_order) out.scores.push_back(t.at(metric, algo).mean);
  return out;
}

RobustnessReport robustness(std::span<const PerformanceVector> vectors,
                            const std::string& dataset_id,
                            std::span<const std::uint64_t> protocol_ids) {
  if (vectors.size() < 2) throw DataError("insufficient p-datasets");
  const std::size_t n = vectors.size();
  if (!protocol_ids.empty() && protocol_ids.size() != n)
    throw DataError("protocol id list does not match the vector count");
  for (const auto& v : vectors) {
    if (v.scores.size() != vectors[0].scores.size())
      throw DataError("performance vectors differ in length");
    if (!(v.metric == vectors[0].metric))
      throw DataError("performance vectors mix metrics");
  }

  RobustnessReport report;
  report.dataset_id = dataset_id;
  report.metric = vectors[0].metric;
  report.n_pdatasets = n;

  auto id_of = [&](std::size_t i) {
    return protocol_ids.empty() ? static_cast<std::uint64_t>(i) : protocol_ids[i];
  };

  std::vector<double> correlations;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool constant = false;
      for (const auto* v : {&vectors[i], &vectors[j]}) {
        bool all_equal = true;
        for (double x : v->scores) all_equal = all_equal && x == v->scores[0];
        constant = constant || all_equal;
      }
      if (constant) {
        ++report.n_skipped_pairs;
        continue;
      }
      const double rho = spearman(vectors[i].scores, vectors[j].scores);
      report.pair_correlations.push_back({id_of(i), id_of(j), rho});
      correlations.push_back(rho);
    }
  }
  if (correlations.empty()) throw DataError("insufficient p-datasets");
  report.robustness = percentile_linear(correlations, 5.0);
  return report;
}

Signature signature(const MetricTable& t, std::span<const MetricId> metric_order,
                    std::span<const std::string> algo_order) {
  Signature sig;
  sig.metric_order.assign(metric_order.begin(), metric_order.end());
  sig.algo_order.assign(algo_order.begin(), algo_order.end());
  sig.values.reserve(metric_order.size() * algo_order.size());
  for (const auto& m : metric_order)
    for (const auto& a : algo_order) sig.values.push_back(t.at(m, a).mean);
  return sig;
}

namespace {

void check_comparable(const Signature& a, const Signature& b) {
  if (a.metric_order != b.metric_order || a.algo_order != b.algo_order ||
      a.values.size() != b.values.size())
    throw DataError("incomparable signatures");
}

}  // namespace

SelectionResult select_protocol(const Signature& target,
                                std::span<const std::pair<std::uint64_t, Signature>> pool,
                                bool zscore) {
  if (pool.empty()) throw DataError("empty signature pool");
  for (const auto& [id, sig] : pool) check_comparable(target, sig);

  const std::size_t dim = target.values.size();
  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  if (zscore) {
    for (std::size_t c = 0; c < dim; ++c) {
      std::vector<double> column;
      column.reserve(pool.size());
      for (const auto& [id, sig] : pool) column.push_back(sig.values[c]);
      mean[c] = mean_of(column);
      sd[c] = stdev_of(column);
    }
  }
  auto coord = [&](const Signature& s, std::size_t c) {
    if (!zscore) return s.values[c];
    return sd[c] > 0.0 ? (s.values[c] - mean[c]) / sd[c] : 0.0;
  };

  SelectionResult best;
  bool first = true;
  for (const auto& [id, sig] : pool) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double diff = coord(sig, c) - coord(target, c);
      d2 += diff * diff;
    }
    const double dist = std::sqrt(d2);
    if (first || dist < best.distance ||
        (dist == best.distance && id < best.protocol_id)) {
      best = {id, dist};
      first = false;
    }
  }
  return best;
}

EmbedMethod parse_embed_method(const std::string& name) {
  if (name == "pca") return EmbedMethod::Pca;
  if (name == "tsne") return EmbedMethod::Tsne;
  throw ConfigError("unknown embedding method '" + name + "'");
}

std::vector<std::array<double, 2>> embed_2d(std::span<const Signature> signatures,
                                            EmbedMethod method, std::uint64_t seed) {
  const std::size_t n = signatures.size();
  const std::size_t min_points = method == EmbedMethod::Tsne ? 5 : 3;
  if (n < min_points)
    throw DataError("embedding needs at least " + std::to_string(min_points) + " signatures");
  for (const auto& sig : signatures) check_comparable(signatures[0], sig);

  const std::size_t dim = signatures[0].values.size();
  Eigen::MatrixXd x(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) x(i, c) = signatures[i].values[c];

  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();

  std::vector<std::array<double, 2>> out(n);
  if (method == EmbedMethod::Pca) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, 2);
    const auto comps = std::min<Eigen::Index>(2, svd.matrixV().cols());
    Eigen::MatrixXd v = svd.matrixV().leftCols(comps);
    // Deterministic sign: largest-magnitude loading positive.
    for (Eigen::Index c = 0; c < comps; ++c) {
      Eigen::Index argmax = 0;
      v.col(c).cwiseAbs().maxCoeff(&argmax);
      if (v(argmax, c) < 0.0) v.col(c) = -v.col(c);
    }
    coords.leftCols(comps) = centered * v;
    for (std::size_t i = 0; i < n; ++i) out[i] = {coords(i, 0), coords(i, 1)};
  } else {
    const double perplexity = std::min(5.0, static_cast<double>(n - 1) / 3.0);
    Eigen::MatrixX2d coords = tsne_exact(centered, perplexity, 1000, seed);
    for (std::size_t i = 0; i < n; ++i) out[i] = {coords(i, 0), coords(i, 1)};
  }
  return out;
}

}  // namespace reprobench

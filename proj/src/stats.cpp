#include "reprobench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"

namespace reprobench {

std::vector<double> rank_average_ties(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw DataError("rank vector needs at least 2 values");
  for (double v : values)
    if (!std::isfinite(v)) throw DataError("non-finite value in rank input");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the mean of ranks i+1..j+1
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw DataError("spearman: need at least 2 values");

  auto constant = [](std::span<const double> v) {
    for (double t : v)
      if (t != v[0]) return false;
    return true;
  };
  if (constant(x) || constant(y)) throw DataError("undefined correlation: constant vector");

  const auto rx = rank_average_ties(x);
  const auto ry = rank_average_ties(y);

  // Exact endpoints: identical rank vectors and exact mirrors would otherwise
  // land 1 ulp off through the sqrt.
  bool identical = true, mirrored = true;
  const double mirror_sum = static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    identical = identical && rx[i] == ry[i];
    mirrored = mirrored && rx[i] + ry[i] == mirror_sum;
  }
  if (identical) return 1.0;
  if (mirrored) return -1.0;

  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double rho = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(rho, -1.0, 1.0);
}

double percentile_linear(std::span<const double> values, double p) {
  if (values.empty()) throw DataError("percentile of empty list");
  if (p < 0.0 || p > 100.0) throw DataError("percentile p outside [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = (p / 100.0) * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double mean_of(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double stdev_of(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<double> bootstrap_stat_values(
    std::uint64_t n_units, std::uint64_t n_boot, std::uint64_t seed,
    const std::function<double(std::span<const std::uint32_t>)>& stat) {
  if (n_units == 0) throw DataError("bootstrap over zero units");
  if (n_boot < 2) throw DataError("bootstrap needs n_boot >= 2");
  auto eng = rng::make_engine(seed);
  std::vector<std::uint32_t> idx(n_units);
  std::vector<double> out;
  out.reserve(n_boot);
  for (std::uint64_t b = 0; b < n_boot; ++b) {
    for (auto& t : idx) t = static_cast<std::uint32_t>(rng::uniform_below(eng, n_units));
    out.push_back(stat(idx));
  }
  return out;
}

BootstrapResult bootstrap_std_ci(std::span<const double> per_unit_values, std::uint64_t n_boot,
                                 std::uint64_t seed) {
  const std::size_t n = per_unit_values.size();
  const auto resampled = bootstrap_stat_values(
      n, n_boot, seed, [&](std::span<const std::uint32_t> idx) {
        double s = 0.0;
        for (auto i : idx) s += per_unit_values[i];
        return s / static_cast<double>(idx.size());
      });
  return {mean_of(per_unit_values), stdev_of(resampled)};
}

}  // namespace reprobench

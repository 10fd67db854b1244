#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace reprobench {

// 1-based ranks; tied values share the mean of the ranks they occupy.
std::vector<double> rank_average_ties(std::span<const double> values);

// Pearson correlation of the average-tie rank vectors. Errors on constant
// input ("undefined correlation"). Exactly 1.0 / -1.0 when the rank vectors
// are identical / exact mirrors.
double spearman(std::span<const double> x, std::span<const double> y);

// Sort-ascending, h = (p/100)(n-1), linear interpolation between neighbors.
double percentile_linear(std::span<const double> values, double p);

struct BootstrapResult {
  double mean = 0.0;   // mean of the original values
  double stdev = 0.0;  // std of the n_boot resampled means
};

// Resamples units with replacement n_boot times; deterministic given seed.
BootstrapResult bootstrap_std_ci(std::span<const double> per_unit_values,
                                 std::uint64_t n_boot, std::uint64_t seed);

// Generalized bootstrap for statistics that are not means of per-unit values
// (e.g. catalog coverage): `stat` maps a resampled index multiset to a value.
// Shares the index stream with bootstrap_std_ci for a given (n_units, seed).
std::vector<double> bootstrap_stat_values(
    std::uint64_t n_units, std::uint64_t n_boot, std::uint64_t seed,
    const std::function<double(std::span<const std::uint32_t>)>& stat);

double mean_of(std::span<const double> values);
double stdev_of(std::span<const double> values);  // sample std, n-1

}  // namespace reprobench

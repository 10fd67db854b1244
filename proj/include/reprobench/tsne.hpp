#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace reprobench {

// Exact (O(n^2)) t-SNE to 2 dimensions with seeded initialization.
Eigen::MatrixX2d tsne_exact(const Eigen::MatrixXd& points, double perplexity,
                            std::uint64_t iterations, std::uint64_t seed);

}  // namespace reprobench

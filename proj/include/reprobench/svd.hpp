#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>

namespace reprobench {

struct SvdResult {
  Eigen::MatrixXd u;  // m x rank
  Eigen::VectorXd s;  // rank
  Eigen::MatrixXd v;  // n x rank
};

// Truncated SVD by seeded randomized range finding (Gaussian test matrix,
// QR re-orthonormalized power iterations, dense SVD of the projected matrix).
SvdResult randomized_svd(const Eigen::SparseMatrix<double>& a, std::uint64_t rank,
                         std::uint64_t oversampling, std::uint64_t power_iterations,
                         std::uint64_t seed);

}  // namespace reprobench

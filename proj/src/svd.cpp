#include "reprobench/svd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"

namespace reprobench {

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

SvdResult randomized_svd(const Eigen::SparseMatrix<double>& a, std::uint64_t rank,
                         std::uint64_t oversampling, std::uint64_t power_iterations,
                         std::uint64_t seed) {
  const auto m = static_cast<std::uint64_t>(a.rows());
  const auto n = static_cast<std::uint64_t>(a.cols());
  if (rank == 0) throw DataError("svd rank must be >= 1");
  if (rank >= std::min(m, n))
    throw DataError("svd rank must be < min(n_users, n_items)");

  const std::uint64_t l = std::min<std::uint64_t>(rank + oversampling, std::min(m, n));

  auto eng = rng::make_engine(seed);
  Eigen::MatrixXd omega(n, l);
  for (std::uint64_t j = 0; j < l; ++j)
    for (std::uint64_t i = 0; i < n; ++i) omega(i, j) = rng::normal(eng);

  Eigen::MatrixXd q = thin_q(a * omega);
  for (std::uint64_t it = 0; it < power_iterations; ++it) {
    Eigen::MatrixXd z = thin_q(a.transpose() * q);
    q = thin_q(a * z);
  }

  // Project and decompose the small matrix; Jacobi wants rows >= cols.
  Eigen::MatrixXd b = q.transpose() * a;  // l x n
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.transpose(),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdResult out;
  out.u = q * svd.matrixV().leftCols(rank);
  out.s = svd.singularValues().head(rank);
  out.v = svd.matrixU().leftCols(rank);
  return out;
}

}  // namespace reprobench

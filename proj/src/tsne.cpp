#include "reprobench/tsne.hpp"

#include <algorithm>
#include <cmath>

#include "reprobench/errors.hpp"
#include "reprobench/rng.hpp"

namespace reprobench {

namespace {

// Gaussian kernel row with the bandwidth found by binary search so the row
// entropy matches log(perplexity).
void fill_p_row(const Eigen::MatrixXd& d2, Eigen::MatrixXd& p, Eigen::Index i,
                double perplexity) {
  const Eigen::Index n = d2.rows();
  double beta = 1.0, beta_min = -1e300, beta_max = 1e300;
  const double log_u = std::log(perplexity);

  for (int iter = 0; iter < 50; ++iter) {
    double sum = 0.0, dot = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) {
        p(i, j) = 0.0;
        continue;
      }
      const double v = std::exp(-beta * d2(i, j));
      p(i, j) = v;
      sum += v;
      dot += v * d2(i, j);
    }
    if (sum <= 0.0) sum = 1e-300;
    const double entropy = std::log(sum) + beta * dot / sum;
    const double diff = entropy - log_u;
    if (std::abs(diff) < 1e-5) break;
    if (diff > 0) {
      beta_min = beta;
      beta = beta_max > 1e299 ? beta * 2.0 : (beta + beta_max) / 2.0;
    } else {
      beta_max = beta;
      beta = beta_min < -1e299 ? beta / 2.0 : (beta + beta_min) / 2.0;
    }
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) sum += p(i, j);
  if (sum <= 0.0) sum = 1e-300;
  for (Eigen::Index j = 0; j < n; ++j) p(i, j) /= sum;
}

}  // namespace

Eigen::MatrixX2d tsne_exact(const Eigen::MatrixXd& points, double perplexity,
                            std::uint64_t iterations, std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw DataError("t-sne needs at least 2 points");
  if (perplexity <= 0.0) throw DataError("perplexity must be positive");

  // Pairwise squared distances.
  Eigen::VectorXd sq = points.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                       2.0 * points * points.transpose();
  d2 = d2.cwiseMax(0.0);

  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) fill_p_row(d2, p, i, perplexity);
  p = (p + p.transpose()).eval() / (2.0 * static_cast<double>(n));
  p = p.cwiseMax(1e-12);

  const double exaggeration = 12.0;
  const std::uint64_t exaggeration_until = std::min<std::uint64_t>(250, iterations);
  p *= exaggeration;

  auto eng = rng::make_engine(seed);
  Eigen::MatrixX2d y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 2; ++c) y(i, c) = 1e-4 * rng::normal(eng);

  Eigen::MatrixX2d velocity = Eigen::MatrixX2d::Zero(n, 2);
  Eigen::MatrixX2d gains = Eigen::MatrixX2d::Ones(n, 2);
  const double learning_rate = 200.0;

  for (std::uint64_t iter = 0; iter < iterations; ++iter) {
    // Student-t affinities in the embedding.
    Eigen::VectorXd ysq = y.rowwise().squaredNorm();
    Eigen::MatrixXd num = ysq.replicate(1, n) + ysq.transpose().replicate(n, 1) -
                          2.0 * y * y.transpose();
    num = (1.0 + num.array()).inverse().matrix();
    num.diagonal().setZero();
    const double q_sum = std::max(num.sum(), 1e-300);

    Eigen::MatrixX2d grad = Eigen::MatrixX2d::Zero(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = num(i, j) / q_sum;
        const double mult = 4.0 * (p(i, j) - q) * num(i, j);
        grad.row(i) += mult * (y.row(i) - y.row(j));
      }
    }

    const double momentum = iter < exaggeration_until ? 0.5 : 0.8;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        const bool same_sign = (grad(i, c) > 0.0) == (velocity(i, c) > 0.0);
        gains(i, c) = same_sign ? gains(i, c) * 0.8 : gains(i, c) + 0.2;
        gains(i, c) = std::max(gains(i, c), 0.01);
        velocity(i, c) = momentum * velocity(i, c) - learning_rate * gains(i, c) * grad(i, c);
        y(i, c) += velocity(i, c);
      }
    }
    y.rowwise() -= y.colwise().mean();

    if (iter + 1 == exaggeration_until) p /= exaggeration;
  }
  return y;
}

}  // namespace reprobench

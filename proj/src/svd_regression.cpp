#include "etran/svd_regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace etran {

namespace {

constexpr double kRelativeCutoff = 1e-12;

/// Number of leading singular values that are both within the requested rank and
/// above the numerical cutoff.
Eigen::Index usable_rank(const Eigen::VectorXd& singular, Eigen::Index kept_rank) {
  const auto n = std::min<Eigen::Index>(kept_rank, singular.size());
  if (n == 0) return 0;
  const double floor = kRelativeCutoff * singular[0];
  Eigen::Index used = 0;
  while (used < n && singular[used] > floor) ++used;
  return used;
}

}  // namespace

Eigen::Index default_kept_rank(Eigen::Index rows, Eigen::Index cols) {
  const auto m = std::min(rows, cols);
  // exact ceil(0.8 m) = ceil(4m / 5)
  return (4 * m + 4) / 5;
}

Reconstruction truncated_reconstruction(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets) {
  return truncated_reconstruction(features, targets, default_kept_rank(features.rows(), features.cols()));
}

Reconstruction truncated_reconstruction(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                                        Eigen::Index kept_rank) {
  if (targets.rows() != features.rows()) throw InputError("targets and features differ in row count");
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(features, Eigen::ComputeThinU);
  const auto used = usable_rank(svd.singularValues(), kept_rank);
  const auto basis = svd.matrixU().leftCols(used);
  Reconstruction out;
  out.targets = basis * (basis.transpose() * targets);
  out.kept_rank = kept_rank;
  return out;
}

Eigen::MatrixXd truncated_least_squares(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                                        Eigen::Index kept_rank) {
  if (targets.rows() != features.rows()) throw InputError("targets and features differ in row count");
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(features, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto used = usable_rank(svd.singularValues(), kept_rank);
  const Eigen::VectorXd inverse = svd.singularValues().head(used).cwiseInverse();
  return svd.matrixV().leftCols(used) * inverse.asDiagonal() * (svd.matrixU().leftCols(used).transpose() * targets);
}

std::vector<Eigen::Index> holdout_permutation(Eigen::Index count) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // std::shuffle's draw sequence is implementation-defined; this one is not.
  std::mt19937_64 rng(0);
  for (auto i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

SvdRegressionResult regression_score(const Eigen::MatrixXd& features, const Eigen::MatrixXd& boxes, bool holdout) {
  if (boxes.cols() != 4 || boxes.rows() != features.rows())
    throw InputError("box targets must be a K x 4 matrix matching the feature rows");
  const auto K = features.rows();

  SvdRegressionResult result;
  result.holdout = holdout;
  Eigen::MatrixXd residual;
  if (!holdout) {
    const auto rec = truncated_reconstruction(features, boxes);
    residual = boxes - rec.targets;
    result.kept_rank = rec.kept_rank;
  } else {
    const auto train = static_cast<Eigen::Index>(std::ceil(0.7 * static_cast<double>(K)));
    const auto test = K - train;
    if (test < 2)
      throw ConfigError("holdout split leaves " + std::to_string(test) + " test samples, at least 2 are needed");
    const auto order = holdout_permutation(K);
    const std::vector<Eigen::Index> train_rows(order.begin(), order.begin() + train);
    const std::vector<Eigen::Index> test_rows(order.begin() + train, order.end());
    const Eigen::MatrixXd train_x = features(train_rows, Eigen::all);
    result.kept_rank = default_kept_rank(train_x.rows(), train_x.cols());
    const Eigen::MatrixXd weights = truncated_least_squares(train_x, boxes(train_rows, Eigen::all), result.kept_rank);
    residual = boxes(test_rows, Eigen::all) - features(test_rows, Eigen::all) * weights;
  }
  result.per_column_mse = residual.colwise().squaredNorm().transpose() / static_cast<double>(residual.rows());
  result.score = 0.0 - result.per_column_mse.mean();
  return result;
}

SvdRegressionResult regression_score(const FeatureSet& set, bool holdout) {
  return regression_score(set.features_f64(), set.boxes_f64(), holdout);
}

}  // namespace etran

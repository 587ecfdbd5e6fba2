#include "etran/lda.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace etran {

ScatterMatrices scatter_matrices(const Eigen::MatrixXd& features, const LabelVector& labels, int class_count) {
  const auto K = features.rows();
  const auto h = features.cols();
  if (labels.size() != K) throw InputError("labels length differs from the number of feature rows");

  ScatterMatrices s;
  s.class_means = Eigen::MatrixXd::Zero(class_count, h);
  s.class_sizes = Eigen::VectorXd::Zero(class_count);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto c = labels[k];
    if (c < 0 || c >= class_count) throw InputError("label " + std::to_string(c) + " outside [0, C)");
    s.class_means.row(c) += features.row(k);
    s.class_sizes[c] += 1.0;
  }
  for (int c = 0; c < class_count; ++c) {
    if (s.class_sizes[c] == 0.0) throw InputError("class " + std::to_string(c) + " has zero samples");
    s.class_means.row(c) /= s.class_sizes[c];
  }
  s.mean = features.colwise().mean().transpose();

  Eigen::MatrixXd deviations(K, h);
  for (Eigen::Index k = 0; k < K; ++k) deviations.row(k) = features.row(k) - s.class_means.row(labels[k]);
  s.within = Eigen::MatrixXd::Zero(h, h);
  s.within.selfadjointView<Eigen::Lower>().rankUpdate(deviations.transpose());
  s.within = s.within.selfadjointView<Eigen::Lower>();

  const Eigen::MatrixXd offsets = s.class_means.rowwise() - s.mean.transpose();
  s.between = offsets.transpose() * s.class_sizes.asDiagonal() * offsets;
  return s;
}

double lda_epsilon(const Eigen::MatrixXd& within) {
  return std::max(1e-4 * within.trace() / static_cast<double>(within.rows()), 1e-10);
}

LdaModel lda_fit(const Eigen::MatrixXd& features, const LabelVector& labels, int class_count) {
  const auto s = scatter_matrices(features, labels, class_count);
  const auto K = static_cast<double>(features.rows());
  const auto h = features.cols();
  const auto r = std::min<Eigen::Index>(class_count - 1, h);

  LdaModel model;
  model.epsilon = lda_epsilon(s.within);
  const Eigen::MatrixXd regularized = s.within + model.epsilon * Eigen::MatrixXd::Identity(h, h);
  const Eigen::LLT<Eigen::MatrixXd> chol(regularized);
  if (chol.info() != Eigen::Success)
    throw InputError("Cholesky factorization of the regularized within-class scatter failed");

  // Whitened problem L^-1 Sb L^-T y = lambda y, then v = L^-T y.
  const auto& L = chol.matrixL();
  Eigen::MatrixXd whitened = L.solve(s.between);
  whitened = L.solve(whitened.transpose()).eval();
  whitened = (0.5 * (whitened + whitened.transpose())).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(whitened);

  // Ascending order from the solver; keep the top r, largest first.
  const Eigen::MatrixXd top = eig.eigenvectors().rightCols(r).rowwise().reverse();
  model.eigenvalues = eig.eigenvalues().tail(r).reverse().cwiseMax(0.0);
  model.projection = chol.matrixU().solve(top) * std::sqrt(K);
  model.class_means_projected = s.class_means * model.projection;
  model.class_priors = s.class_sizes / K;
  return model;
}

LdaModel lda_fit(const FeatureSet& set) { return lda_fit(set.features_f64(), set.labels, set.class_count); }

Eigen::MatrixXd lda_posteriors(const Eigen::MatrixXd& features, const LdaModel& model) {
  if (features.cols() != model.projection.rows())
    throw InputError("feature dimension " + std::to_string(features.cols()) + " differs from the fitted model (" +
                     std::to_string(model.projection.rows()) + ")");
  const Eigen::MatrixXd& means = model.class_means_projected;
  const Eigen::RowVectorXd offset =
      (model.class_priors.array().log() - 0.5 * means.rowwise().squaredNorm().array()).matrix().transpose();
  Eigen::MatrixXd delta = (features * model.projection) * means.transpose();
  delta.rowwise() += offset;
  // row-wise softmax
  const Eigen::VectorXd top = delta.rowwise().maxCoeff();
  delta = (delta.colwise() - top).array().exp().matrix();
  const Eigen::VectorXd total = delta.rowwise().sum();
  return total.cwiseInverse().asDiagonal() * delta;
}

ClassificationResult classification_score(const Eigen::MatrixXd& features, const LabelVector& labels,
                                          const LdaModel& model) {
  if (labels.size() != features.rows()) throw InputError("labels length differs from the number of feature rows");
  const auto C = model.class_means_projected.rows();
  const Eigen::MatrixXd posterior = lda_posteriors(features, model);
  ClassificationResult result;
  result.per_sample_posterior.resize(features.rows());
  double sum = 0.0;
  for (Eigen::Index k = 0; k < features.rows(); ++k) {
    if (labels[k] < 0 || labels[k] >= C) throw InputError("label outside the fitted class range");
    result.per_sample_posterior[k] = posterior(k, labels[k]);
    sum += result.per_sample_posterior[k];
  }
  result.score = sum / static_cast<double>(features.rows());
  return result;
}

ClassificationResult classification_score(const FeatureSet& set, const LdaModel& model) {
  if (set.class_count != model.class_means_projected.rows())
    throw InputError("class count differs from the fitted model");
  return classification_score(set.features_f64(), set.labels, model);
}

ClassificationResult classification_score(const FeatureSet& set) {
  const auto X = set.features_f64();
  return classification_score(X, set.labels, lda_fit(X, set.labels, set.class_count));
}

}  // namespace etran

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "etran/feature_set.hpp"

namespace etran {

struct ScatterMatrices {
  Eigen::MatrixXd between;      // sum_c K_c (mu_c - mu)(mu_c - mu)^T
  Eigen::MatrixXd within;       // sum_c sum_{k in c} (f_k - mu_c)(f_k - mu_c)^T
  Eigen::VectorXd mean;         // mu
  Eigen::MatrixXd class_means;  // C x h, row c = mu_c
  Eigen::VectorXd class_sizes;  // K_c
};

/// Throws InputError if some class in [0, class_count) has no samples.
ScatterMatrices scatter_matrices(const Eigen::MatrixXd& features, const LabelVector& labels, int class_count);

/// Regularizer added to the within-class scatter: 1e-4 * trace / h, at least 1e-10.
double lda_epsilon(const Eigen::MatrixXd& within);

/// Discriminant subspace and Gaussian class model in that subspace.
///
/// The projection solves between * v = lambda * (within + eps I) * v and keeps the
/// r = min(C - 1, h) directions with the largest lambda. Columns are scaled so that
/// the projected within-class covariance, (within + eps I) / K, is the identity:
/// each class is then modelled as N(U^T mu_c, I) in the projected space.
struct LdaModel {
  Eigen::MatrixXd projection;             // h x r
  Eigen::MatrixXd class_means_projected;  // C x r
  Eigen::VectorXd class_priors;           // K_c / K
  Eigen::VectorXd eigenvalues;            // r, descending, clamped at 0
  double epsilon = 0.0;
};

LdaModel lda_fit(const Eigen::MatrixXd& features, const LabelVector& labels, int class_count);
LdaModel lda_fit(const FeatureSet& set);

struct ClassificationResult {
  Eigen::VectorXd per_sample_posterior;  // posterior of the true class
  double score = 0.0;                    // mean of per_sample_posterior
};

/// Class posteriors from the unit-covariance Bayes discriminant
/// delta_c = x^T m_c - |m_c|^2 / 2 + log prior_c with x = U^T f, m_c = U^T mu_c.
Eigen::MatrixXd lda_posteriors(const Eigen::MatrixXd& features, const LdaModel& model);

ClassificationResult classification_score(const Eigen::MatrixXd& features, const LabelVector& labels,
                                          const LdaModel& model);
ClassificationResult classification_score(const FeatureSet& set, const LdaModel& model);

/// Fit and score on the same set.
ClassificationResult classification_score(const FeatureSet& set);

}  // namespace etran

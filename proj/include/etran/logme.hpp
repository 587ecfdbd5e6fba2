#pragma once

#include <Eigen/Dense>

#include "etran/feature_set.hpp"

namespace etran {

/// Eigendecomposition of f^T f, shared by every target column scored against
/// the same features.
struct EvidenceBasis {
  Eigen::MatrixXd features;   // K x h
  Eigen::VectorXd gram_eigenvalues;   // sigma_i, clamped at 0
  Eigen::MatrixXd gram_eigenvectors;  // h x h

  explicit EvidenceBasis(Eigen::MatrixXd f);
  Eigen::Index samples() const { return features.rows(); }
  Eigen::Index dimension() const { return features.cols(); }
};

struct EvidenceResult {
  double evidence = 0.0;  // log marginal likelihood of the target, not normalized
  double alpha = 1.0;     // prior precision of the weights
  double gamma = 1.0;     // noise precision
  int iterations = 0;
  bool converged = false;
};

struct EvidenceOptions {
  int max_iterations = 200;
  double tolerance = 1e-6;  // relative change in evidence
};

/// Log evidence of `target` under the Bayesian linear model
/// b ~ N(f w, 1/gamma), w ~ N(0, 1/alpha):
///   K/2 log gamma + h/2 log alpha - K/2 log 2pi - gamma/2 |f q - b|^2
///   - alpha/2 q^T q - 1/2 log det A,   A = alpha I + gamma f^T f, q = gamma A^-1 f^T b.
double log_evidence(const EvidenceBasis& basis, const Eigen::VectorXd& target, double alpha, double gamma);

/// MacKay fixed-point iteration from alpha = gamma = 1. Throws InputError when the
/// evidence is not finite (for example all-zero features).
EvidenceResult evidence_maximize(const EvidenceBasis& basis, const Eigen::VectorXd& target,
                                 EvidenceOptions options = {});
EvidenceResult evidence_maximize(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                                 EvidenceOptions options = {});

/// Mean over target columns of evidence / K.
double mean_evidence_per_sample(const EvidenceBasis& basis, const Eigen::MatrixXd& targets);

/// LogME regression baseline over the four box columns.
double logme_regression_score(const FeatureSet& set);

/// LogME classification: one-hot labels treated as C regression targets.
double logme_classification_score(const FeatureSet& set);

}  // namespace etran

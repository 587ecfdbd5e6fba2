#include "etran/logme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace etran {

namespace {

// Added to the fixed-point denominators; keeps alpha and gamma finite when the
// fitted weights or the residual vanish (zero or exactly linear targets).
constexpr double kGuard = 1e-5;

/// Sufficient statistics of one target in the eigenbasis of f^T f.
struct Projection {
  Eigen::VectorXd coords;  // V^T f^T b
  double squared_norm;     // |b|^2
};

Projection project(const EvidenceBasis& basis, const Eigen::VectorXd& target) {
  if (target.size() != basis.samples()) throw InputError("target length differs from the number of feature rows");
  return {basis.gram_eigenvectors.transpose() * (basis.features.transpose() * target), target.squaredNorm()};
}

struct Posterior {
  double weights_norm2;   // q^T q
  double residual2;       // |f q - b|^2
  double effective_dims;  // sum gamma sigma / (alpha + gamma sigma)
  double log_det;         // log det A
};

Posterior posterior(const EvidenceBasis& basis, const Projection& p, double alpha, double gamma) {
  const auto& sigma = basis.gram_eigenvalues;
  const Eigen::ArrayXd denom = alpha + gamma * sigma.array();
  const Eigen::ArrayXd q = gamma * p.coords.array() / denom;
  Posterior out;
  out.weights_norm2 = q.square().sum();
  out.residual2 =
      std::max(p.squared_norm - 2.0 * (q * p.coords.array()).sum() + (sigma.array() * q.square()).sum(), 0.0);
  out.effective_dims = (gamma * sigma.array() / denom).sum();
  out.log_det = denom.log().sum();
  return out;
}

double evidence_at(const EvidenceBasis& basis, const Posterior& post, double alpha, double gamma) {
  const auto K = static_cast<double>(basis.samples());
  const auto h = static_cast<double>(basis.dimension());
  return 0.5 * K * std::log(gamma) + 0.5 * h * std::log(alpha) - 0.5 * K * std::log(2.0 * std::numbers::pi) -
         0.5 * gamma * post.residual2 - 0.5 * alpha * post.weights_norm2 - 0.5 * post.log_det;
}

}  // namespace

EvidenceBasis::EvidenceBasis(Eigen::MatrixXd f) : features(std::move(f)) {
  const auto h = features.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(h, h);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  gram_eigenvalues = eig.eigenvalues().cwiseMax(0.0);
  gram_eigenvectors = eig.eigenvectors();
}

double log_evidence(const EvidenceBasis& basis, const Eigen::VectorXd& target, double alpha, double gamma) {
  const auto p = project(basis, target);
  return evidence_at(basis, posterior(basis, p, alpha, gamma), alpha, gamma);
}

EvidenceResult evidence_maximize(const EvidenceBasis& basis, const Eigen::VectorXd& target, EvidenceOptions options) {
  const auto p = project(basis, target);
  const auto K = static_cast<double>(basis.samples());

  EvidenceResult r;
  auto post = posterior(basis, p, r.alpha, r.gamma);
  r.evidence = evidence_at(basis, post, r.alpha, r.gamma);
  while (r.iterations < options.max_iterations) {
    const double alpha = post.effective_dims / (post.weights_norm2 + kGuard);
    const double gamma = (K - post.effective_dims) / (post.residual2 + kGuard);
    if (!(alpha > 0.0) || !(gamma > 0.0) || !std::isfinite(alpha) || !std::isfinite(gamma)) {
      r.evidence = -std::numeric_limits<double>::infinity();
      break;
    }
    post = posterior(basis, p, alpha, gamma);
    const double evidence = evidence_at(basis, post, alpha, gamma);
    ++r.iterations;
    const double change = std::abs(evidence - r.evidence);
    r.alpha = alpha;
    r.gamma = gamma;
    r.evidence = evidence;
    if (change <= options.tolerance * std::abs(evidence)) {
      r.converged = true;
      break;
    }
  }
  if (!std::isfinite(r.evidence)) throw InputError("evidence is not finite; features are degenerate");
  return r;
}

EvidenceResult evidence_maximize(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                                 EvidenceOptions options) {
  return evidence_maximize(EvidenceBasis(features), target, options);
}

double mean_evidence_per_sample(const EvidenceBasis& basis, const Eigen::MatrixXd& targets) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < targets.cols(); ++j) sum += evidence_maximize(basis, targets.col(j)).evidence;
  return sum / static_cast<double>(targets.cols()) / static_cast<double>(basis.samples());
}

double logme_regression_score(const FeatureSet& set) {
  const auto boxes = set.boxes_f64();
  return mean_evidence_per_sample(EvidenceBasis(set.features_f64()), boxes);
}

double logme_classification_score(const FeatureSet& set) {
  Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(set.sample_count(), set.class_count);
  for (Eigen::Index k = 0; k < set.sample_count(); ++k) {
    const auto c = set.labels[k];
    if (c < 0 || c >= set.class_count) throw InputError("label outside [0, C)");
    one_hot(k, c) = 1.0;
  }
  return mean_evidence_per_sample(EvidenceBasis(set.features_f64()), one_hot);
}

}  // namespace etran

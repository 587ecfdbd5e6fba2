#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "etran/feature_set.hpp"

namespace etran {

/// Max-shifted log-sum-exp; finite for every finite input.
template <class Derived>
typename Derived::Scalar logsumexp(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Scalar top = values.maxCoeff();
  return top + std::log((values.derived().array() - top).exp().sum());
}

/// Free energy of one feature row: -log sum_j exp(f_j).
template <class Derived>
typename Derived::Scalar free_energy(const Eigen::DenseBase<Derived>& row) {
  return -logsumexp(row);
}

struct EnergyResult {
  Eigen::VectorXd per_sample_energy;
  double score = 0.0;
};

/// Label-free transferability: negated mean free energy over the rows of `features`.
/// Rows are reduced in index order so the result is reproducible bit for bit.
template <class Derived>
EnergyResult energy_score(const Eigen::MatrixBase<Derived>& features) {
  const auto K = features.rows();
  EnergyResult result;
  result.per_sample_energy.resize(K);
  for (Eigen::Index k = 0; k < K; ++k)
    result.per_sample_energy[k] = static_cast<double>(free_energy(features.row(k).template cast<double>()));
  double sum = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) sum += result.per_sample_energy[k];
  result.score = -sum / static_cast<double>(K);
  return result;
}

inline EnergyResult energy_score(const FeatureSet& set) { return energy_score(set.features); }

/// Returns (log max softmax(logits), max(logits) + E(logits)), two routes to the same value.
template <class Derived>
std::pair<typename Derived::Scalar, typename Derived::Scalar> softmax_energy_identity(
    const Eigen::DenseBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar top = logits.maxCoeff();
  const auto shifted = (logits.derived().array() - top).exp().eval();
  // softmax evaluated explicitly, then its largest entry logged
  const Scalar max_probability = (shifted / shifted.sum()).maxCoeff();
  const Scalar lhs = std::log(max_probability);
  const Scalar rhs = top + free_energy(logits);
  return {lhs, rhs};
}

}  // namespace etran

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "etran/feature_set.hpp"

namespace etran {

/// Number of singular values kept: ceil(0.8 * min(K, h)).
Eigen::Index default_kept_rank(Eigen::Index rows, Eigen::Index cols);

struct Reconstruction {
  Eigen::MatrixXd targets;  // f f^+ b, the projection of b onto the kept left singular subspace
  Eigen::Index kept_rank = 0;
};

/// Truncated pseudo-inverse reconstruction of `targets` from `features`.
/// Singular values below 1e-12 * max(s) never enter the inverse, whatever the rank.
Reconstruction truncated_reconstruction(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets);
Reconstruction truncated_reconstruction(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                                        Eigen::Index kept_rank);

/// Least-squares weights W = f^+ b using the truncated pseudo-inverse.
Eigen::MatrixXd truncated_least_squares(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                                        Eigen::Index kept_rank);

struct SvdRegressionResult {
  double score = 0.0;              // -mean(per_column_mse), never positive
  Eigen::Vector4d per_column_mse;  // cx, cy, w, h
  Eigen::Index kept_rank = 0;
  bool holdout = false;
};

/// Full mode scores the reconstruction on all K rows. Holdout mode shuffles rows
/// with a fixed seed, fits on the first ceil(0.7 K) and scores the rest.
SvdRegressionResult regression_score(const FeatureSet& set, bool holdout = false);
SvdRegressionResult regression_score(const Eigen::MatrixXd& features, const Eigen::MatrixXd& boxes,
                                     bool holdout = false);

/// Deterministic row order used by holdout mode (Fisher-Yates over mt19937_64 seeded with 0).
std::vector<Eigen::Index> holdout_permutation(Eigen::Index count);

}  // namespace etran

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "etran/feature_set.hpp"

namespace etran::synthetic {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

inline FeatureSet make_set(const Eigen::MatrixXd& x, const std::vector<int>& y, int classes,
                           const Eigen::MatrixXd* boxes = nullptr, std::string model_id = "m") {
  FeatureSet s;
  s.features = x.cast<float>();
  s.labels.resize(static_cast<Eigen::Index>(y.size()));
  for (std::size_t k = 0; k < y.size(); ++k) s.labels[static_cast<Eigen::Index>(k)] = y[k];
  s.class_count = classes;
  if (boxes) s.boxes = FeatureMatrix(boxes->cast<float>());
  s.model_id = std::move(model_id);
  s.dataset_id = "synthetic";
  return s;
}

/// Balanced labels 0..C-1 repeated.
inline std::vector<int> balanced_labels(Eigen::Index K, int classes) {
  std::vector<int> y(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) y[static_cast<std::size_t>(k)] = static_cast<int>(k % classes);
  return y;
}

/// Target dataset shared by every candidate model: labels and normalized boxes.
struct PlantedDataset {
  std::vector<int> labels;
  Eigen::MatrixXd boxes;  // K x 4 in [0.05, 0.95]
  int classes = 0;
};

inline PlantedDataset planted_dataset(Eigen::Index K, int classes, std::mt19937_64& rng) {
  PlantedDataset d;
  d.classes = classes;
  d.labels = balanced_labels(K, classes);
  std::shuffle(d.labels.begin(), d.labels.end(), rng);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  d.boxes.resize(K, 4);
  for (Eigen::Index k = 0; k < K; ++k)
    for (int j = 0; j < 4; ++j) d.boxes(k, j) = u(rng);
  return d;
}

/// Features of one candidate model with quality in [0, 1]. Class separation and
/// the linear box signal both grow with quality; `offset` is added to every
/// entry, like the positive mean of rectified activations.
inline Eigen::MatrixXd planted_features(const PlantedDataset& d, Eigen::Index dim, double quality, double offset,
                                        std::mt19937_64& rng) {
  const auto K = d.boxes.rows();
  Eigen::MatrixXd class_dirs = gaussian(d.classes, dim, rng);
  class_dirs.rowwise().normalize();
  Eigen::MatrixXd box_mix = gaussian(4, dim, rng);
  box_mix.rowwise().normalize();

  const double class_scale = 0.5 + 3.0 * quality;
  const double box_scale = 1.0 + 6.0 * quality;
  Eigen::MatrixXd x = gaussian(K, dim, rng);
  for (Eigen::Index k = 0; k < K; ++k) {
    x.row(k) += class_scale * class_dirs.row(d.labels[static_cast<std::size_t>(k)]);
    x.row(k) += box_scale * (d.boxes.row(k).array() - 0.5).matrix() * box_mix;
  }
  x.array() += offset;
  return x;
}

}  // namespace etran::synthetic

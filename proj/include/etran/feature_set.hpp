#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace etran {

/// Row-major single-precision storage, the layout written to and read from disk.
using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using LabelVector = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 1>;

/// Raised for malformed inputs: bad stores, violated invariants, id mismatches.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a requested score cannot be computed for the given data or task.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K samples with ĥ-dimensional features, class labels in [0, C) and
/// optional normalized (cx, cy, w, h) box targets.
struct FeatureSet {
  FeatureMatrix features;
  LabelVector labels;
  std::optional<FeatureMatrix> boxes;
  int class_count = 0;
  std::string model_id;
  std::string dataset_id;

  Eigen::Index sample_count() const { return features.rows(); }
  Eigen::Index dimension() const { return features.cols(); }
  bool has_boxes() const { return boxes.has_value(); }

  /// Features widened to double; every score works in 64-bit.
  Eigen::MatrixXd features_f64() const { return features.cast<double>(); }
  Eigen::MatrixXd boxes_f64() const;
};

struct ValidationOptions {
  bool require_boxes = false;
  /// Every class in [0, C) must occur at least once (needed by the LDA score).
  bool require_all_classes = false;
};

/// One human-readable line per violated invariant; empty means valid.
using ValidationReport = std::vector<std::string>;

ValidationReport validate_feature_set(const FeatureSet& set, ValidationOptions options = {});

inline ValidationReport validate_feature_set(const FeatureSet& set, bool require_boxes) {
  return validate_feature_set(set, ValidationOptions{require_boxes, false});
}

/// Per-class sample counts, length class_count. Labels outside [0, C) are ignored.
std::vector<Eigen::Index> class_counts(const FeatureSet& set);

}  // namespace etran

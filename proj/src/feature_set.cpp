#include "etran/feature_set.hpp"

#include <cmath>
#include <sstream>

namespace etran {

Eigen::MatrixXd FeatureSet::boxes_f64() const {
  if (!boxes) throw ConfigError("feature set '" + model_id + "' carries no box targets");
  return boxes->cast<double>();
}

std::vector<Eigen::Index> class_counts(const FeatureSet& set) {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(std::max(set.class_count, 0)), 0);
  for (Eigen::Index k = 0; k < set.labels.size(); ++k) {
    const auto c = set.labels[k];
    if (c >= 0 && c < set.class_count) ++counts[static_cast<std::size_t>(c)];
  }
  return counts;
}

ValidationReport validate_feature_set(const FeatureSet& set, ValidationOptions options) {
  ValidationReport report;
  auto add = [&report](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    report.push_back(os.str());
  };

  const auto K = set.sample_count();
  if (K < 2) add("sample count K=", K, " is below 2");
  if (set.dimension() < 1) add("feature dimension is 0");
  if (set.class_count < 2) add("class count C=", set.class_count, " is below 2");

  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index j = 0; j < set.dimension(); ++j) {
      if (!std::isfinite(set.features(k, j))) {
        add("features row ", k, " column ", j, " is not finite");
        break;
      }
    }
  }

  if (set.labels.size() != K) {
    add("labels length ", set.labels.size(), " differs from K=", K);
  } else {
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto c = set.labels[k];
      if (c < 0 || c >= set.class_count)
        add("labels row ", k, " has class ", c, " outside [0, ", set.class_count, ")");
    }
  }

  if (options.require_all_classes && set.class_count >= 2) {
    const auto counts = class_counts(set);
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (counts[c] == 0) add("class ", c, " has no samples");
  }

  if (set.boxes) {
    const auto& b = *set.boxes;
    if (b.rows() != K || b.cols() != 4) {
      add("boxes shape ", b.rows(), "x", b.cols(), " differs from ", K, "x4");
    } else {
      for (Eigen::Index k = 0; k < K; ++k) {
        for (Eigen::Index j = 0; j < 4; ++j) {
          const float v = b(k, j);
          if (!(v >= 0.0f && v <= 1.0f)) {
            add("boxes row ", k, " column ", j, " is outside [0, 1]");
            break;
          }
        }
      }
    }
  } else if (options.require_boxes) {
    add("box targets are required but absent");
  }
  return report;
}

}  // namespace etran

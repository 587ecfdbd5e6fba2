#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "etran/feature_set.hpp"

namespace etran {

/// Per-image backbone output, C_feat x H_feat x W_feat stored channel-major
/// (index = (c * H + y) * W + x).
struct SpatialFeatureMap {
  std::string image_id;
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> values;
  int image_height = 0;
  int image_width = 0;

  float at(int c, int y, int x) const {
    return values[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  float& at(int c, int y, int x) { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }
};

/// Normalized (cx, cy, w, h) box relative to the image.
struct NormalizedBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 1.0;
  double h = 1.0;
};

struct BoxAnnotation {
  std::string image_id;
  int class_id = 0;
  NormalizedBox box;
};

/// Half-open cell range [y0, y1) x [x0, x1) covered by a box on an H x W grid.
struct GridRegion {
  int y0, y1, x0, x1;
};

/// Low edge floors, high edge ceils, both clamp to the grid; never empty.
GridRegion box_region(const NormalizedBox& box, int height, int width);

/// Channel-wise mean of the map over the box region.
Eigen::VectorXd pool_box(const SpatialFeatureMap& map, const NormalizedBox& box);

/// Concatenates pooled vectors for every annotation. Rows are ordered by image id,
/// then by annotation order within the image.
FeatureSet construct_detection_features(const std::vector<SpatialFeatureMap>& maps,
                                        const std::vector<BoxAnnotation>& annotations,
                                        const std::string& model_id, const std::string& dataset_id,
                                        int class_count = 0);

/// `image_id class_id cx cy w h` per line; blank lines and `#` comments are skipped.
std::vector<BoxAnnotation> parse_annotations(std::istream& in);
std::vector<BoxAnnotation> read_annotations(const std::filesystem::path& file);

/// A directory holding `maps.json`, one `feat_<image_id>.f32` per image and `annotations.txt`.
struct MapBundle {
  std::string model_id;
  std::string dataset_id;
  int class_count = 0;
  std::vector<SpatialFeatureMap> maps;
  std::vector<BoxAnnotation> annotations;
};

MapBundle read_map_bundle(const std::filesystem::path& directory);
void write_map_bundle(const MapBundle& bundle, const std::filesystem::path& directory);

}  // namespace etran

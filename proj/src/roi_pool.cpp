#include "etran/roi_pool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "etran/feature_store.hpp"
#include "json.hpp"

namespace etran {
namespace fs = std::filesystem;

namespace {

std::pair<int, int> axis_span(double center, double extent, int cells) {
  const double lo = (center - extent / 2.0) * cells;
  const double hi = (center + extent / 2.0) * cells;
  int a = std::clamp(static_cast<int>(std::floor(lo)), 0, cells);
  int b = std::clamp(static_cast<int>(std::ceil(hi)), 0, cells);
  if (b <= a) {
    a = std::min(a, cells - 1);
    b = a + 1;
  }
  return {a, b};
}

void check_annotation(const BoxAnnotation& a) {
  const auto& b = a.box;
  const bool ok = b.cx >= 0 && b.cx <= 1 && b.cy >= 0 && b.cy <= 1 && b.w > 0 && b.w <= 1 && b.h > 0 && b.h <= 1;
  if (!ok) throw InputError("annotation for image '" + a.image_id + "' has a box outside the normalized range");
  if (a.class_id < 0) throw InputError("annotation for image '" + a.image_id + "' has a negative class id");
}

}  // namespace

GridRegion box_region(const NormalizedBox& box, int height, int width) {
  const auto [y0, y1] = axis_span(box.cy, box.h, height);
  const auto [x0, x1] = axis_span(box.cx, box.w, width);
  return {y0, y1, x0, x1};
}

Eigen::VectorXd pool_box(const SpatialFeatureMap& map, const NormalizedBox& box) {
  const auto r = box_region(box, map.height, map.width);
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(map.channels);
  for (int c = 0; c < map.channels; ++c) {
    double sum = 0.0;
    for (int y = r.y0; y < r.y1; ++y)
      for (int x = r.x0; x < r.x1; ++x) sum += map.at(c, y, x);
    pooled[c] = sum;
  }
  return pooled / static_cast<double>((r.y1 - r.y0) * (r.x1 - r.x0));
}

FeatureSet construct_detection_features(const std::vector<SpatialFeatureMap>& maps,
                                        const std::vector<BoxAnnotation>& annotations,
                                        const std::string& model_id, const std::string& dataset_id,
                                        int class_count) {
  if (annotations.empty()) throw InputError("no samples: annotation collection is empty");

  std::map<std::string, const SpatialFeatureMap*> by_id;
  int channels = -1;
  for (const auto& m : maps) {
    if (m.channels < 1 || m.height < 1 || m.width < 1)
      throw InputError("feature map '" + m.image_id + "' has an empty dimension");
    if (m.values.size() != static_cast<std::size_t>(m.channels) * m.height * m.width)
      throw InputError("feature map '" + m.image_id + "' value count does not match its shape");
    if (!std::all_of(m.values.begin(), m.values.end(), [](float v) { return std::isfinite(v); }))
      throw InputError("feature map '" + m.image_id + "' has non-finite values");
    if (channels >= 0 && m.channels != channels)
      throw InputError("inconsistent channel count across feature maps: " + std::to_string(channels) + " vs " +
                       std::to_string(m.channels));
    channels = m.channels;
    if (!by_id.emplace(m.image_id, &m).second) throw InputError("duplicate feature map for image '" + m.image_id + "'");
  }

  std::vector<const BoxAnnotation*> ordered;
  ordered.reserve(annotations.size());
  int max_class = 0;
  for (const auto& a : annotations) {
    check_annotation(a);
    if (!by_id.contains(a.image_id)) throw InputError("annotation references missing image '" + a.image_id + "'");
    max_class = std::max(max_class, a.class_id);
    ordered.push_back(&a);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const BoxAnnotation* l, const BoxAnnotation* r) { return l->image_id < r->image_id; });

  const auto K = static_cast<Eigen::Index>(ordered.size());
  FeatureSet set;
  set.model_id = model_id;
  set.dataset_id = dataset_id;
  set.class_count = class_count > 0 ? class_count : max_class + 1;
  set.features.resize(K, channels);
  set.labels.resize(K);
  FeatureMatrix boxes(K, 4);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& a = *ordered[static_cast<std::size_t>(k)];
    set.features.row(k) = pool_box(*by_id.at(a.image_id), a.box).cast<float>().transpose();
    set.labels[k] = a.class_id;
    boxes.row(k) << static_cast<float>(a.box.cx), static_cast<float>(a.box.cy), static_cast<float>(a.box.w),
        static_cast<float>(a.box.h);
  }
  set.boxes = std::move(boxes);
  return set;
}

std::vector<BoxAnnotation> parse_annotations(std::istream& in) {
  std::vector<BoxAnnotation> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    BoxAnnotation a;
    if (!(fields >> a.image_id >> a.class_id >> a.box.cx >> a.box.cy >> a.box.w >> a.box.h))
      throw InputError("annotation line " + std::to_string(line_no) + " is malformed");
    std::string extra;
    if (fields >> extra) throw InputError("annotation line " + std::to_string(line_no) + " has trailing fields");
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<BoxAnnotation> read_annotations(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open annotations " + file.string());
  return parse_annotations(in);
}

MapBundle read_map_bundle(const fs::path& directory) {
  using nlohmann::json;
  const auto manifest_path = directory / "maps.json";
  if (!fs::exists(manifest_path)) throw InputError("maps.json missing in " + directory.string());
  MapBundle bundle;
  try {
    const auto j = json::parse(std::ifstream(manifest_path));
    if (j.at("format_version").get<int>() != kFormatVersion) throw InputError("unknown maps format_version");
    bundle.model_id = j.at("model_id").get<std::string>();
    bundle.dataset_id = j.at("dataset_id").get<std::string>();
    bundle.class_count = j.value("c", 0);
    for (const auto& e : j.at("maps")) {
      SpatialFeatureMap m;
      m.image_id = e.at("image_id").get<std::string>();
      const auto shape = e.at("shape").get<std::vector<int>>();
      if (shape.size() != 3) throw InputError("map shape for '" + m.image_id + "' must have 3 entries");
      m.channels = shape[0];
      m.height = shape[1];
      m.width = shape[2];
      m.image_height = e.value("image_height", 0);
      m.image_width = e.value("image_width", 0);
      const auto name = e.at("file").get<std::string>();
      const auto bytes = read_bytes(directory / name);
      if (bytes.size() != static_cast<std::size_t>(m.channels) * m.height * m.width * 4)
        throw InputError("shape mismatch for " + name);
      if (e.contains("checksum") && e.at("checksum").get<std::string>() != to_hex(fnv1a64(bytes)))
        throw InputError("checksum mismatch for " + name);
      m.values = decode_f32(bytes);
      bundle.maps.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed maps.json: ") + e.what());
  }
  bundle.annotations = read_annotations(directory / "annotations.txt");
  return bundle;
}

void write_map_bundle(const MapBundle& bundle, const fs::path& directory) {
  using nlohmann::json;
  fs::create_directories(directory);
  json maps = json::array();
  for (const auto& m : bundle.maps) {
    const auto name = "feat_" + m.image_id + ".f32";
    const auto bytes = encode_f32(m.values);
    write_bytes(directory / name, bytes);
    maps.push_back({{"image_id", m.image_id},
                    {"file", name},
                    {"shape", {m.channels, m.height, m.width}},
                    {"image_height", m.image_height},
                    {"image_width", m.image_width},
                    {"checksum", to_hex(fnv1a64(bytes))}});
  }
  const json j = {{"format_version", kFormatVersion},
                  {"model_id", bundle.model_id},
                  {"dataset_id", bundle.dataset_id},
                  {"c", bundle.class_count},
                  {"maps", maps}};
  std::ofstream(directory / "maps.json", std::ios::trunc) << j.dump(2) << "\n";
  std::ofstream out(directory / "annotations.txt", std::ios::trunc);
  out.precision(9);
  for (const auto& a : bundle.annotations)
    out << a.image_id << ' ' << a.class_id << ' ' << a.box.cx << ' ' << a.box.cy << ' ' << a.box.w << ' ' << a.box.h
        << '\n';
}

}  // namespace etran

#include "etran/feature_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace etran {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kFeaturesName = "features.f32";
constexpr const char* kLabelsName = "labels.i32";
constexpr const char* kBoxesName = "boxes.f32";

template <class T>
std::vector<std::byte> encode_le(std::span<const T> values) {
  static_assert(sizeof(T) == 4);
  std::vector<std::byte> out(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t word;
    std::memcpy(&word, &values[i], 4);
    for (int b = 0; b < 4; ++b) out[i * 4 + b] = static_cast<std::byte>((word >> (8 * b)) & 0xffu);
  }
  return out;
}

template <class T>
std::vector<T> decode_le(std::span<const std::byte> bytes) {
  static_assert(sizeof(T) == 4);
  if (bytes.size() % 4 != 0) throw InputError("tensor byte length is not a multiple of 4");
  std::vector<T> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t word = 0;
    for (int b = 0; b < 4; ++b) word |= std::to_integer<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
    std::memcpy(&out[i], &word, 4);
  }
  return out;
}

json to_json(const Manifest& m) {
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"name", f.name}, {"dtype", f.dtype}, {"shape", f.shape}});
  return {{"format_version", m.format_version},
          {"model_id", m.model_id},
          {"dataset_id", m.dataset_id},
          {"k", m.k},
          {"h", m.h},
          {"c", m.c},
          {"has_boxes", m.has_boxes},
          {"files", files},
          {"checksums", m.checksums}};
}

Manifest from_json(const json& j) {
  Manifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion)
      throw InputError("unknown format_version " + std::to_string(m.format_version));
    m.model_id = j.at("model_id").get<std::string>();
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.k = j.at("k").get<std::int64_t>();
    m.h = j.at("h").get<std::int64_t>();
    m.c = j.at("c").get<std::int64_t>();
    m.has_boxes = j.at("has_boxes").get<bool>();
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("name").get<std::string>(), f.at("dtype").get<std::string>(),
                         f.at("shape").get<std::vector<std::int64_t>>()});
    m.checksums = j.at("checksums").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

const TensorFile& find_file(const Manifest& m, const std::string& name) {
  for (const auto& f : m.files)
    if (f.name == name) return f;
  throw InputError("manifest does not list " + name);
}

/// Reads a listed tensor file, checking shape, byte length and checksum.
std::vector<std::byte> load_tensor(const fs::path& dir, const Manifest& m, const std::string& name,
                                   std::vector<std::int64_t> expected_shape) {
  const auto& entry = find_file(m, name);
  if (entry.shape != expected_shape) throw InputError("shape mismatch for " + name + ": manifest header disagrees");
  const auto path = dir / name;
  if (!fs::exists(path)) throw InputError("missing file " + path.string());
  auto bytes = read_bytes(path);
  if (static_cast<std::int64_t>(bytes.size()) != entry.element_count() * 4)
    throw InputError("shape mismatch for " + name + ": declared " + std::to_string(entry.element_count() * 4) +
                     " bytes, found " + std::to_string(bytes.size()));
  const auto it = m.checksums.find(name);
  if (it == m.checksums.end()) throw InputError("no checksum listed for " + name);
  if (to_hex(fnv1a64(bytes)) != it->second) throw InputError("checksum mismatch for " + name);
  return bytes;
}

}  // namespace

std::int64_t TensorFile::element_count() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::uint64_t fnv1a64(std::span<const std::byte> bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (auto b : bytes) {
    hash ^= std::to_integer<std::uint64_t>(b);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string to_hex(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) s[static_cast<std::size_t>(i)] = digits[value & 0xf];
  return s;
}

std::vector<std::byte> encode_f32(std::span<const float> values) { return encode_le(values); }
std::vector<std::byte> encode_i32(std::span<const std::int32_t> values) { return encode_le(values); }
std::vector<float> decode_f32(std::span<const std::byte> bytes) { return decode_le<float>(bytes); }
std::vector<std::int32_t> decode_i32(std::span<const std::byte> bytes) { return decode_le<std::int32_t>(bytes); }

std::vector<std::byte> read_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open " + file.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw InputError("failed reading " + file.string());
  return bytes;
}

void write_bytes(const fs::path& file, std::span<const std::byte> bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

Manifest write_feature_set(const FeatureSet& set, const fs::path& directory) {
  if (const auto report = validate_feature_set(set, false); !report.empty())
    throw InputError("refusing to write invalid feature set: " + report.front());

  const auto K = static_cast<std::int64_t>(set.sample_count());
  const auto H = static_cast<std::int64_t>(set.dimension());

  std::vector<std::pair<TensorFile, std::vector<std::byte>>> tensors;
  tensors.push_back({{kFeaturesName, "f32", {K, H}},
                     encode_f32({set.features.data(), static_cast<std::size_t>(set.features.size())})});
  tensors.push_back({{kLabelsName, "i32", {K}},
                     encode_i32({set.labels.data(), static_cast<std::size_t>(set.labels.size())})});
  if (set.boxes)
    tensors.push_back({{kBoxesName, "f32", {K, 4}},
                       encode_f32({set.boxes->data(), static_cast<std::size_t>(set.boxes->size())})});

  Manifest m;
  m.model_id = set.model_id;
  m.dataset_id = set.dataset_id;
  m.k = K;
  m.h = H;
  m.c = set.class_count;
  m.has_boxes = set.has_boxes();

  fs::create_directories(directory);
  for (const auto& [file, bytes] : tensors) {
    write_bytes(directory / file.name, bytes);
    m.files.push_back(file);
    m.checksums[file.name] = to_hex(fnv1a64(bytes));
  }
  const auto text = to_json(m).dump(2) + "\n";
  std::ofstream(directory / kManifestName, std::ios::trunc) << text;
  return m;
}

Manifest read_manifest(const fs::path& directory) {
  const auto path = directory / kManifestName;
  if (!fs::exists(path)) throw InputError("manifest missing in " + directory.string());
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  return from_json(j);
}

FeatureSet read_feature_set(const fs::path& directory) {
  const auto m = read_manifest(directory);
  if (m.k < 0 || m.h < 0) throw InputError("negative shape in manifest");

  FeatureSet set;
  set.model_id = m.model_id;
  set.dataset_id = m.dataset_id;
  set.class_count = static_cast<int>(m.c);

  const auto features = decode_f32(load_tensor(directory, m, kFeaturesName, {m.k, m.h}));
  set.features = Eigen::Map<const FeatureMatrix>(features.data(), m.k, m.h);

  const auto labels = decode_i32(load_tensor(directory, m, kLabelsName, {m.k}));
  set.labels = Eigen::Map<const LabelVector>(labels.data(), m.k);

  if (m.has_boxes) {
    const auto boxes = decode_f32(load_tensor(directory, m, kBoxesName, {m.k, 4}));
    set.boxes = FeatureMatrix(Eigen::Map<const FeatureMatrix>(boxes.data(), m.k, 4));
  }
  return set;
}

}  // namespace etran

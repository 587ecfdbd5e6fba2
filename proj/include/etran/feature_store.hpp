#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "etran/feature_set.hpp"

namespace etran {

inline constexpr int kFormatVersion = 1;

struct TensorFile {
  std::string name;
  std::string dtype;  // "f32" or "i32"
  std::vector<std::int64_t> shape;

  std::int64_t element_count() const;
};

/// Contents of `manifest.json` in a feature-store directory.
struct Manifest {
  int format_version = kFormatVersion;
  std::string model_id;
  std::string dataset_id;
  std::int64_t k = 0;
  std::int64_t h = 0;
  std::int64_t c = 0;
  bool has_boxes = false;
  std::vector<TensorFile> files;
  std::map<std::string, std::string> checksums;  // file name -> 16 hex digits
};

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::span<const std::byte> bytes);
std::string to_hex(std::uint64_t value);

Manifest write_feature_set(const FeatureSet& set, const std::filesystem::path& directory);
FeatureSet read_feature_set(const std::filesystem::path& directory);
Manifest read_manifest(const std::filesystem::path& directory);

/// Little-endian, row-major, headerless tensor I/O shared with the spatial map bundle.
std::vector<std::byte> encode_f32(std::span<const float> values);
std::vector<std::byte> encode_i32(std::span<const std::int32_t> values);
std::vector<float> decode_f32(std::span<const std::byte> bytes);
std::vector<std::int32_t> decode_i32(std::span<const std::byte> bytes);

std::vector<std::byte> read_bytes(const std::filesystem::path& file);
void write_bytes(const std::filesystem::path& file, std::span<const std::byte> bytes);

}  // namespace etran

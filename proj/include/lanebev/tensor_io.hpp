#pragma once

// BLDT binary tensor files:
//
//   offset  size        field
//   0       4           magic "BLDT"
//   4       2           version (uint16 LE, = 1)
//   6       1           ndim (uint8, 1..4)
//   7       4 * ndim    dims (uint32 LE each)
//   ...     4 * prod    payload, float32 LE, row-major
//
// Multi-channel grids are stored channel-major: dims (C, rows, cols).

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lanebev/grid.hpp"
#include "lanebev/view_transform.hpp"

namespace lanebev {

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline constexpr std::uint16_t kTensorFormatVersion = 1;

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const Tensor& tensor, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path);

/// Ground truth as (4, rows, cols): confidence, offset, height, instance.
Tensor ground_truth_to_tensor(const GridTensors& gt);
/// Prediction as (3 + D, rows, cols): confidence, offset, height, embedding.
Tensor prediction_to_tensor(const GridTensors& pred);
GridTensors prediction_from_tensor(const Tensor& tensor);

/// Feature maps as (H, W, C).
Tensor feature_to_tensor(const FeatureTensor& feature);
FeatureTensor feature_from_tensor(const Tensor& tensor, int scale = 32);

/// Dense map as a 2-D tensor plus a JSON sidecar "<path>.json" with shapes.
void write_view_relation_map(const ViewRelationMap& map, const std::filesystem::path& path);
ViewRelationMap read_view_relation_map(const std::filesystem::path& path);

}  // namespace lanebev

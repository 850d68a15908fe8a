#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

#include "lanebev/camera.hpp"

namespace lanebev {

/// Row-major H x W x C image of 32-bit floats (channels interleaved).
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels = 1, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  float& at(int row, int col, int channel = 0) {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + channel];
  }
  float at(int row, int col, int channel = 0) const {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + channel];
  }

  bool contains(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Bilinear sample at sub-pixel position (x = column, y = row), pixel centres
/// on integer coordinates. Taps that fall outside the image read as 0.
float sample_bilinear(const Image& image, double x, double y, int channel = 0);

/// Inverse warp: output(u, v) = input(H^-1 (u, v, 1)), bilinear, constant 0
/// border.
Image warp_image(const Image& image, const Homographyd& h, ImageSize out_size);

/// 8-bit binary PGM (P5) or PPM (P6). Values are stored as 0..255 floats.
Image read_pnm(const std::filesystem::path& path);
void write_pnm(const Image& image, const std::filesystem::path& path);

}  // namespace lanebev

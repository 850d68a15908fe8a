#include "lanebev/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace lanebev {

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    fail(ErrorCode::InvalidShape, "image dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

float sample_bilinear(const Image& image, double x, double y, int channel) {
  if (!std::isfinite(x) || !std::isfinite(y)) return 0.0f;
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  if (fx < -1.0 || fy < -1.0 || fx > image.width() || fy > image.height()) return 0.0f;
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double ax = x - fx;
  const double ay = y - fy;

  auto tap = [&](int row, int col) -> double {
    return image.contains(row, col) ? image.at(row, col, channel) : 0.0;
  };
  double value = (1.0 - ax) * (1.0 - ay) * tap(y0, x0);
  if (ax != 0.0) value += ax * (1.0 - ay) * tap(y0, x0 + 1);
  if (ay != 0.0) value += (1.0 - ax) * ay * tap(y0 + 1, x0);
  if (ax != 0.0 && ay != 0.0) value += ax * ay * tap(y0 + 1, x0 + 1);
  return static_cast<float>(value);
}

Image warp_image(const Image& image, const Homographyd& h, ImageSize out_size) {
  if (image.empty()) fail(ErrorCode::InvalidShape, "cannot warp an empty image");
  if (std::abs(h.matrix.determinant()) <= 1e-12) {
    fail(ErrorCode::SingularHomography, "homography is not invertible");
  }
  const Eigen::Matrix3d inv = h.matrix.inverse();
  Image out(out_size.width, out_size.height, image.channels());
  for (int v = 0; v < out_size.height; ++v) {
    for (int u = 0; u < out_size.width; ++u) {
      const Eigen::Vector3d q = inv * Eigen::Vector3d(u, v, 1.0);
      if (q.z() <= 0.0) continue;
      const double x = q.x() / q.z();
      const double y = q.y() / q.z();
      for (int c = 0; c < image.channels(); ++c) out.at(v, u, c) = sample_bilinear(image, x, y, c);
    }
  }
  return out;
}

namespace {

std::string next_token(std::istream& in) {
  std::string token;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(ch);
  }
  return token;
}

}  // namespace

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  const std::string magic = next_token(in);
  int channels = 0;
  if (magic == "P5") channels = 1;
  else if (magic == "P6") channels = 3;
  else fail(ErrorCode::BadMagic, "expected a binary PGM/PPM file: " + path.string());

  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token(in));
    height = std::stoi(next_token(in));
    maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidShape, "malformed PNM header in " + path.string());
  }
  if (maxval != 255) fail(ErrorCode::UnsupportedVersion, "only 8-bit PNM files are supported");

  Image image(width, height, channels);
  std::vector<unsigned char> bytes(image.data().size());
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    fail(ErrorCode::TruncatedPayload, "PNM pixel data is truncated in " + path.string());
  }
  std::transform(bytes.begin(), bytes.end(), image.data().begin(),
                 [](unsigned char b) { return static_cast<float>(b); });
  return image;
}

void write_pnm(const Image& image, const std::filesystem::path& path) {
  if (image.channels() != 1 && image.channels() != 3) {
    fail(ErrorCode::InvalidShape, "PNM output needs 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << (image.channels() == 1 ? "P5" : "P6") << '\n'
      << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<unsigned char> bytes(image.data().size());
  std::transform(image.data().begin(), image.data().end(), bytes.begin(), [](float v) {
    return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
  });
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace lanebev

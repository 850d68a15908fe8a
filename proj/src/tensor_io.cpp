#include "lanebev/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "lanebev/errors.hpp"

namespace lanebev {

namespace {

constexpr std::uint8_t kMagic[4] = {'B', 'L', 'D', 'T'};
constexpr std::size_t kMaxDims = 4;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  return static_cast<std::uint32_t>(bytes[at]) | static_cast<std::uint32_t>(bytes[at + 1]) << 8 |
         static_cast<std::uint32_t>(bytes[at + 2]) << 16 | static_cast<std::uint32_t>(bytes[at + 3]) << 24;
}

void require_dims(const Tensor& t, std::size_t ndim, const char* what) {
  if (t.dims.size() != ndim) {
    fail(ErrorCode::InvalidShape, std::string(what) + " expects a " + std::to_string(ndim) + "-D tensor");
  }
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  if (tensor.dims.empty() || tensor.dims.size() > kMaxDims) {
    fail(ErrorCode::InvalidShape, "tensor rank must be between 1 and 4");
  }
  if (tensor.values.size() != tensor.element_count()) {
    fail(ErrorCode::InvalidShape, "tensor payload does not match its dimensions");
  }
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(7 + 4 * tensor.dims.size() + 4 * tensor.values.size());
  put_u16(out, kTensorFormatVersion);
  out.push_back(static_cast<std::uint8_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put_u32(out, d);
  for (float v : tensor.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    fail(ErrorCode::BadMagic, "not a BLDT tensor file");
  }
  if (bytes.size() < 7) fail(ErrorCode::TruncatedPayload, "header is truncated");
  const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | bytes[5] << 8);
  if (version != kTensorFormatVersion) {
    fail(ErrorCode::UnsupportedVersion, "tensor format version " + std::to_string(version));
  }
  const std::size_t ndim = bytes[6];
  if (ndim == 0 || ndim > kMaxDims) fail(ErrorCode::InvalidShape, "tensor rank " + std::to_string(ndim));
  const std::size_t header = 7 + 4 * ndim;
  if (bytes.size() < header) fail(ErrorCode::TruncatedPayload, "dimension table is truncated");

  Tensor t;
  // Element count accumulated against the available payload so absurd
  // dimensions cannot overflow.
  const std::size_t available = (bytes.size() - header) / 4;
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    const std::uint32_t d = get_u32(bytes, 7 + 4 * i);
    t.dims.push_back(d);
    if (count != 0 && d > available / count + 1) count = available + 1;
    else count = std::min<std::size_t>(count * d, available + 1);
  }
  if (bytes.size() - header != 4 * count) {
    const std::string need = count > available ? "more" : std::to_string(4 * count);
    fail(ErrorCode::TruncatedPayload,
         "payload holds " + std::to_string(bytes.size() - header) + " bytes, dimensions need " + need);
  }
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) t.values[i] = std::bit_cast<float>(get_u32(bytes, header + 4 * i));
  return t;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "short write to " + path.string());
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  write_bytes(encode_tensor(tensor), path);
}

Tensor read_tensor(const std::filesystem::path& path) { return decode_tensor(read_bytes(path)); }

namespace {

template <typename Matrix>
void append_plane(std::vector<float>& values, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(static_cast<float>(m(r, c)));
}

}  // namespace

Tensor ground_truth_to_tensor(const GridTensors& gt) {
  Tensor t;
  t.dims = {4, static_cast<std::uint32_t>(gt.rows()), static_cast<std::uint32_t>(gt.cols())};
  t.values.reserve(t.element_count());
  append_plane(t.values, gt.confidence);
  append_plane(t.values, gt.offset);
  append_plane(t.values, gt.height);
  append_plane(t.values, gt.instance);
  return t;
}

Tensor prediction_to_tensor(const GridTensors& pred) {
  const int d = pred.embed_dim();
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(3 + d), static_cast<std::uint32_t>(pred.rows()),
            static_cast<std::uint32_t>(pred.cols())};
  t.values.reserve(t.element_count());
  append_plane(t.values, pred.confidence);
  append_plane(t.values, pred.offset);
  append_plane(t.values, pred.height);
  for (int k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < pred.embedding.rows(); ++i) t.values.push_back(static_cast<float>(pred.embedding(i, k)));
  return t;
}

GridTensors prediction_from_tensor(const Tensor& tensor) {
  require_dims(tensor, 3, "prediction");
  if (tensor.dims[0] < 3) fail(ErrorCode::InvalidShape, "prediction needs at least 3 channels");
  const int rows = static_cast<int>(tensor.dims[1]);
  const int cols = static_cast<int>(tensor.dims[2]);
  const int d = static_cast<int>(tensor.dims[0]) - 3;
  GridTensors pred = GridTensors::zeros(rows, cols, d);
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  for (std::size_t i = 0; i < plane; ++i) {
    pred.confidence.data()[i] = tensor.values[i];
    pred.offset.data()[i] = tensor.values[plane + i];
    pred.height.data()[i] = tensor.values[2 * plane + i];
  }
  for (int k = 0; k < d; ++k)
    for (std::size_t i = 0; i < plane; ++i)
      pred.embedding(static_cast<Eigen::Index>(i), k) = tensor.values[(3 + k) * plane + i];
  return pred;
}

Tensor feature_to_tensor(const FeatureTensor& feature) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(feature.shape.height), static_cast<std::uint32_t>(feature.shape.width),
            static_cast<std::uint32_t>(feature.channels())};
  t.values.reserve(t.element_count());
  append_plane(t.values, feature.data);
  return t;
}

FeatureTensor feature_from_tensor(const Tensor& tensor, int scale) {
  require_dims(tensor, 3, "feature map");
  FeatureTensor f({static_cast<int>(tensor.dims[0]), static_cast<int>(tensor.dims[1])},
                  static_cast<int>(tensor.dims[2]), scale);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < f.data.rows(); ++r)
    for (Eigen::Index c = 0; c < f.data.cols(); ++c) f.data(r, c) = tensor.values[k++];
  return f;
}

void write_view_relation_map(const ViewRelationMap& map, const std::filesystem::path& path) {
  map.validate();
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(map.matrix.rows()), static_cast<std::uint32_t>(map.matrix.cols())};
  t.values.reserve(t.element_count());
  append_plane(t.values, map.matrix);
  write_tensor(t, path);

  const nlohmann::json sidecar = {{"fv_shape", {map.fv_shape.height, map.fv_shape.width}},
                                  {"bev_shape", {map.bev_shape.height, map.bev_shape.width}},
                                  {"scale", map.scale},
                                  {"layout", "row-major; rows = bev pixels, cols = front-view pixels"}};
  std::ofstream out(path.string() + ".json");
  if (!out) fail(ErrorCode::IoError, "cannot write sidecar for " + path.string());
  out << sidecar.dump(2) << '\n';
}

ViewRelationMap read_view_relation_map(const std::filesystem::path& path) {
  const Tensor t = read_tensor(path);
  require_dims(t, 2, "view relation map");
  std::ifstream in(path.string() + ".json");
  if (!in) fail(ErrorCode::IoError, "missing sidecar " + path.string() + ".json");
  nlohmann::json sidecar;
  try {
    in >> sidecar;
    ViewRelationMap map;
    map.fv_shape = {sidecar.at("fv_shape").at(0).get<int>(), sidecar.at("fv_shape").at(1).get<int>()};
    map.bev_shape = {sidecar.at("bev_shape").at(0).get<int>(), sidecar.at("bev_shape").at(1).get<int>()};
    map.scale = sidecar.value("scale", 32);
    map.matrix.resize(t.dims[0], t.dims[1]);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < map.matrix.rows(); ++r)
      for (Eigen::Index c = 0; c < map.matrix.cols(); ++c) map.matrix(r, c) = t.values[k++];
    map.validate();
    return map;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedJson, std::string("bad map sidecar: ") + e.what());
  }
}

}  // namespace lanebev

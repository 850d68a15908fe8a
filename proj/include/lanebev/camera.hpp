#pragma once

// Pinhole camera model over the road plane, virtual-camera averaging and
// ground-plane homographies. Road frame: x forward, y left, z up; the
// extrinsic rotation maps road coordinates into the optical camera frame
// (x right, y down, z forward).

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "lanebev/errors.hpp"

namespace lanebev {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

struct ImageSize {
  int width = 0;
  int height = 0;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

template <typename Scalar>
struct Intrinsics {
  Scalar fx = 1;
  Scalar fy = 1;
  Scalar cx = 0;
  Scalar cy = 0;
  Scalar skew = 0;

  Matrix3<Scalar> matrix() const {
    Matrix3<Scalar> k;
    k << fx, skew, cx, Scalar(0), fy, cy, Scalar(0), Scalar(0), Scalar(1);
    return k;
  }

  static Intrinsics from_matrix(const Matrix3<Scalar>& k) {
    return {k(0, 0), k(1, 1), k(0, 2), k(1, 2), k(0, 1)};
  }
};

template <typename Scalar>
struct Extrinsics {
  Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();

  Vector3<Scalar> to_camera(const Vector3<Scalar>& road) const {
    return rotation * road + translation;
  }

  /// Camera centre in road coordinates.
  Vector3<Scalar> center() const { return -rotation.transpose() * translation; }
};

template <typename Scalar>
struct CameraRig {
  Intrinsics<Scalar> intrinsics;
  Extrinsics<Scalar> extrinsics;
  ImageSize image_size;
};

template <typename Scalar>
struct Homography {
  Matrix3<Scalar> matrix = Matrix3<Scalar>::Identity();

  Vector2<Scalar> apply(const Vector2<Scalar>& p) const {
    const Vector3<Scalar> q = matrix * p.homogeneous();
    return q.hnormalized();
  }

  Homography inverse() const { return normalized(matrix.inverse()); }

  static Homography normalized(const Matrix3<Scalar>& m) {
    if (std::abs(m(2, 2)) <= Scalar(1e-300)) {
      fail(ErrorCode::SingularHomography, "homography has a vanishing (2,2) entry");
    }
    return Homography{m / m(2, 2)};
  }
};

using Intrinsicsd = Intrinsics<double>;
using Extrinsicsd = Extrinsics<double>;
using CameraRigd = CameraRig<double>;
using Homographyd = Homography<double>;

template <typename Scalar>
void validate(const Intrinsics<Scalar>& k) {
  if (!(k.fx > 0) || !(k.fy > 0)) fail(ErrorCode::InvalidField, "focal lengths must be positive");
}

template <typename Scalar>
void validate(const Extrinsics<Scalar>& e, Scalar tolerance = Scalar(1e-9)) {
  const Matrix3<Scalar> gram = e.rotation.transpose() * e.rotation;
  if ((gram - Matrix3<Scalar>::Identity()).cwiseAbs().maxCoeff() > tolerance ||
      std::abs(e.rotation.determinant() - Scalar(1)) > tolerance) {
    fail(ErrorCode::NonOrthonormalRotation, "rotation is not a proper orthonormal matrix");
  }
}

template <typename Scalar>
void validate(const CameraRig<Scalar>& rig) {
  validate(rig.intrinsics);
  validate(rig.extrinsics);
  if (rig.image_size.width <= 0 || rig.image_size.height <= 0) {
    fail(ErrorCode::InvalidField, "image size must be positive");
  }
}

/// Projects the road-plane point (x, y, 0) to pixel coordinates.
template <typename Scalar>
Vector2<Scalar> project_ground_point(const CameraRig<Scalar>& rig, Scalar x, Scalar y) {
  const Vector3<Scalar> cam = rig.extrinsics.to_camera(Vector3<Scalar>(x, y, Scalar(0)));
  if (cam.z() <= Scalar(1e-9)) {
    fail(ErrorCode::DegenerateDepth, "ground point is not in front of the camera");
  }
  return (rig.intrinsics.matrix() * cam).hnormalized();
}

/// Nearest proper rotation to m in Frobenius norm (orthogonal polar factor).
template <typename Derived>
Matrix3<typename Derived::Scalar> nearest_rotation(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3<Scalar> d = Matrix3<Scalar>::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) d(2, 2) = Scalar(-1);
  return svd.matrixU() * d * svd.matrixV().transpose();
}

/// Virtual camera: element-wise mean of intrinsics and translation, chordal
/// mean of rotations. The road->camera transform components are averaged
/// directly.
template <typename Scalar>
CameraRig<Scalar> mean_virtual_camera(std::span<const CameraRig<Scalar>> rigs) {
  if (rigs.empty()) fail(ErrorCode::EmptyInput, "no cameras to average");
  const ImageSize size = rigs.front().image_size;
  if (rigs.size() == 1) return rigs.front();

  Intrinsics<Scalar> k{0, 0, 0, 0, 0};
  Matrix3<Scalar> rotation_sum = Matrix3<Scalar>::Zero();
  Vector3<Scalar> translation_sum = Vector3<Scalar>::Zero();
  for (const auto& rig : rigs) {
    if (!(rig.image_size == size)) fail(ErrorCode::MixedImageSizes, "cameras have different image sizes");
    k.fx += rig.intrinsics.fx;
    k.fy += rig.intrinsics.fy;
    k.cx += rig.intrinsics.cx;
    k.cy += rig.intrinsics.cy;
    k.skew += rig.intrinsics.skew;
    rotation_sum += rig.extrinsics.rotation;
    translation_sum += rig.extrinsics.translation;
  }
  const Scalar n = static_cast<Scalar>(rigs.size());
  k.fx /= n;
  k.fy /= n;
  k.cx /= n;
  k.cy /= n;
  k.skew /= n;

  CameraRig<Scalar> out;
  out.intrinsics = k;
  out.extrinsics.rotation = nearest_rotation(rotation_sum / n);
  out.extrinsics.translation = translation_sum / n;
  out.image_size = size;
  return out;
}

template <typename Scalar>
CameraRig<Scalar> mean_virtual_camera(const std::vector<CameraRig<Scalar>>& rigs) {
  return mean_virtual_camera(std::span<const CameraRig<Scalar>>(rigs));
}

namespace detail {

/// Similarity taking the centroid to the origin with mean distance sqrt(2).
template <typename Scalar>
Matrix3<Scalar> conditioning_transform(const std::vector<Vector2<Scalar>>& points) {
  Vector2<Scalar> centroid = Vector2<Scalar>::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<Scalar>(points.size());
  Scalar mean_dist = 0;
  for (const auto& p : points) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<Scalar>(points.size());
  if (!(mean_dist > Scalar(0))) {
    fail(ErrorCode::DegenerateConfiguration, "all correspondences coincide");
  }
  const Scalar s = std::sqrt(Scalar(2)) / mean_dist;
  Matrix3<Scalar> t;
  t << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  return t;
}

template <typename Scalar>
bool has_collinear_triple(const std::vector<Vector2<Scalar>>& pts, Scalar tolerance) {
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      for (std::size_t c = b + 1; c < pts.size(); ++c) {
        const Vector2<Scalar> u = pts[b] - pts[a];
        const Vector2<Scalar> v = pts[c] - pts[a];
        if (std::abs(u.x() * v.y() - u.y() * v.x()) <= tolerance) return true;
      }
  return false;
}

}  // namespace detail

/// Normalized DLT over point correspondences src[k] -> dst[k].
template <typename Scalar>
Homography<Scalar> estimate_homography_dlt(const std::vector<Vector2<Scalar>>& src,
                                           const std::vector<Vector2<Scalar>>& dst) {
  if (src.size() != dst.size()) fail(ErrorCode::ShapeMismatch, "correspondence lists differ in length");
  if (src.size() < 4) fail(ErrorCode::DegenerateConfiguration, "at least 4 correspondences are required");

  const Matrix3<Scalar> t_src = detail::conditioning_transform(src);
  const Matrix3<Scalar> t_dst = detail::conditioning_transform(dst);
  std::vector<Vector2<Scalar>> a_pts(src.size()), b_pts(dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    a_pts[i] = (t_src * src[i].homogeneous()).hnormalized();
    b_pts[i] = (t_dst * dst[i].homogeneous()).hnormalized();
  }
  // The minimal case is only well posed in general position.
  if (src.size() == 4 && (detail::has_collinear_triple(a_pts, Scalar(1e-9)) ||
                          detail::has_collinear_triple(b_pts, Scalar(1e-9)))) {
    fail(ErrorCode::DegenerateConfiguration, "three of the four correspondences are collinear");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(src.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 9> a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar x = a_pts[i].x(), y = a_pts[i].y();
    const Scalar u = b_pts[i].x(), v = b_pts[i].y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  if (n == 4) {
    // Pad to a square system so the full right singular basis is available.
    a.conservativeResize(9, Eigen::NoChange);
    a.row(8).setZero();
  }

  Eigen::JacobiSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, 9>> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(7) <= std::numeric_limits<Scalar>::epsilon() * 64 * sv(0)) {
    fail(ErrorCode::DegenerateConfiguration, "correspondences do not determine a unique homography");
  }
  const Eigen::Matrix<Scalar, 9, 1> h = svd.matrixV().col(8);
  Matrix3<Scalar> hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

  const Matrix3<Scalar> m = t_dst.inverse() * hn * t_src;
  if (std::abs(m.determinant()) <= Scalar(1e-12) * std::pow(m.norm(), 3)) {
    fail(ErrorCode::DegenerateConfiguration, "estimated homography is singular");
  }
  return Homography<Scalar>::normalized(m);
}

/// Default anchors: corners of a 10 m wide strip over the BEV forward range.
template <typename Scalar>
std::vector<Vector2<Scalar>> default_anchor_points() {
  return {Vector2<Scalar>(3, -5), Vector2<Scalar>(3, 5), Vector2<Scalar>(103, -5),
          Vector2<Scalar>(103, 5)};
}

/// Ground-plane homography taking pixels of `src` to pixels of `dst`, fitted
/// by least squares to the projections of `ground_points`.
template <typename Scalar>
Homography<Scalar> compute_homography(const CameraRig<Scalar>& src, const CameraRig<Scalar>& dst,
                                      const std::vector<Vector2<Scalar>>& ground_points) {
  if (ground_points.size() < 4) {
    fail(ErrorCode::DegenerateConfiguration, "at least 4 ground points are required");
  }
  std::vector<Vector2<Scalar>> u_src, u_dst;
  u_src.reserve(ground_points.size());
  u_dst.reserve(ground_points.size());
  for (const auto& g : ground_points) {
    u_src.push_back(project_ground_point(src, g.x(), g.y()));
    u_dst.push_back(project_ground_point(dst, g.x(), g.y()));
  }
  return estimate_homography_dlt(u_src, u_dst);
}

template <typename Scalar>
Homography<Scalar> compute_homography(const CameraRig<Scalar>& src, const CameraRig<Scalar>& dst) {
  return compute_homography(src, dst, default_anchor_points<Scalar>());
}

/// Canonical forward-looking rig: 1024x576, f = 1000 px, mounted 1.5 m above
/// the road origin and pitched 3 degrees down.
CameraRigd canonical_rig();

/// Road->camera rotation for a camera looking along +x, then pitched down by
/// `pitch` and rolled/yawed by the given angles (radians).
Eigen::Matrix3d road_to_camera_rotation(double pitch, double yaw = 0.0, double roll = 0.0);

/// Builds extrinsics from a road->camera rotation and a camera centre in road
/// coordinates.
Extrinsicsd extrinsics_from_center(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& center);

}  // namespace lanebev

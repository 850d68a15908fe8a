#include "lanebev/camera.hpp"

#include <numbers>

namespace lanebev {

Eigen::Matrix3d road_to_camera_rotation(double pitch, double yaw, double roll) {
  // Road (x fwd, y left, z up) -> optical (x right, y down, z fwd).
  Eigen::Matrix3d axes;
  axes << 0, -1, 0,
          0, 0, -1,
          1, 0, 0;
  // Positive pitch tilts the optical axis towards the road.
  const Eigen::Matrix3d tilt =
      (Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()) *
       Eigen::AngleAxisd(yaw, -Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()))
          .toRotationMatrix();
  return tilt * axes;
}

Extrinsicsd extrinsics_from_center(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& center) {
  return Extrinsicsd{rotation, -rotation * center};
}

CameraRigd canonical_rig() {
  CameraRigd rig;
  rig.intrinsics = Intrinsicsd{1000.0, 1000.0, 512.0, 288.0, 0.0};
  rig.extrinsics = extrinsics_from_center(road_to_camera_rotation(3.0 * std::numbers::pi / 180.0),
                                          Eigen::Vector3d(0.0, 0.0, 1.5));
  rig.image_size = ImageSize{1024, 576};
  return rig;
}

}  // namespace lanebev

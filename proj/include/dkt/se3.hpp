#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace dkt {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Elementary transform axis. Rotations are in radians, translations in metres.
enum class Axis { Rx, Ry, Rz, tx, ty, tz };

constexpr bool is_rotation(Axis a) noexcept { return a == Axis::Rx || a == Axis::Ry || a == Axis::Rz; }

/// Unit direction (0, 1 or 2) of an axis.
constexpr int axis_index(Axis a) noexcept {
  switch (a) {
    case Axis::Rx:
    case Axis::tx:
      return 0;
    case Axis::Ry:
    case Axis::ty:
      return 1;
    default:
      return 2;
  }
}

std::string_view axis_name(Axis a) noexcept;

/// Parses "Rx".."tz". Throws dkt::Error on an unknown label.
Axis parse_axis(std::string_view label);

/// [v]x, so that skew(v) * u == v.cross(u).
Mat3 skew(const Vec3& v);

/// Inverse of skew. Non-antisymmetric input is antisymmetrised first.
Vec3 vex(const Mat3& s);

/// The constant se(3) generator of an elementary transform.
Mat4 generator(Axis a);

/// Homogeneous matrix of one elementary transform evaluated at `value`.
Mat4 elementary(Axis a, double value);

inline Mat3 rot_part(const Mat4& t) { return t.topLeftCorner<3, 3>(); }
inline Vec3 trans_part(const Mat4& t) { return t.topRightCorner<3, 1>(); }

Mat4 make_pose(const Mat3& r, const Vec3& t);

/// R = Rx(gamma) * Ry(beta) * Rz(alpha) for rpy = (alpha, beta, gamma).
Mat3 rpy_to_rot(const Vec3& rpy);

/// Rotation log map. theta in [0, pi]; at theta = pi the axis comes from the
/// largest diagonal of (R + I) / 2 with its first nonzero component positive.
Vec3 rotation_log(const Mat3& r);

/// Pose error (t_d - t_e, log(R_d R_e^T)) in the world frame.
Vec6 angle_axis_error(const Mat4& te, const Mat4& td);

/// Moore-Penrose pseudoinverse by SVD, truncating singular values below
/// sigma_max * rel_tol.
MatX pinv(const MatX& a, double rel_tol = 1e-10);

/// Numerical rank with the same truncation rule as pinv.
int rank(const MatX& a, double rel_tol = 1e-10);

/// True when R is orthonormal with det +1 and the bottom row is (0, 0, 0, 1).
bool is_valid_pose(const Mat4& t, double tol = 1e-9);

}  // namespace dkt

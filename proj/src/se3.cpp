#include "dkt/se3.hpp"

#include <cmath>
#include <string>

#include "dkt/errors.hpp"

namespace dkt {

std::string_view axis_name(Axis a) noexcept {
  switch (a) {
    case Axis::Rx: return "Rx";
    case Axis::Ry: return "Ry";
    case Axis::Rz: return "Rz";
    case Axis::tx: return "tx";
    case Axis::ty: return "ty";
    case Axis::tz: return "tz";
  }
  return "?";
}

Axis parse_axis(std::string_view label) {
  if (label == "Rx") return Axis::Rx;
  if (label == "Ry") return Axis::Ry;
  if (label == "Rz") return Axis::Rz;
  if (label == "tx") return Axis::tx;
  if (label == "ty") return Axis::ty;
  if (label == "tz") return Axis::tz;
  throw Error("unknown axis label '" + std::string(label) + "'");
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Vec3 vex(const Mat3& s) {
  return 0.5 * Vec3(s(2, 1) - s(1, 2), s(0, 2) - s(2, 0), s(1, 0) - s(0, 1));
}

Mat4 generator(Axis a) {
  Mat4 g = Mat4::Zero();
  const int i = axis_index(a);
  if (is_rotation(a)) {
    Vec3 w = Vec3::Zero();
    w[i] = 1.0;
    g.topLeftCorner<3, 3>() = skew(w);
  } else {
    g(i, 3) = 1.0;
  }
  return g;
}

Mat4 elementary(Axis a, double value) {
  Mat4 t = Mat4::Identity();
  if (!is_rotation(a)) {
    t(axis_index(a), 3) = value;
    return t;
  }
  const double c = std::cos(value);
  const double s = std::sin(value);
  switch (a) {
    case Axis::Rx:
      t(1, 1) = c; t(1, 2) = -s;
      t(2, 1) = s; t(2, 2) = c;
      break;
    case Axis::Ry:
      t(0, 0) = c; t(0, 2) = s;
      t(2, 0) = -s; t(2, 2) = c;
      break;
    default:
      t(0, 0) = c; t(0, 1) = -s;
      t(1, 0) = s; t(1, 1) = c;
      break;
  }
  return t;
}

Mat4 make_pose(const Mat3& r, const Vec3& t) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return m;
}

Mat3 rpy_to_rot(const Vec3& rpy) {
  return rot_part(elementary(Axis::Rx, rpy[2])) * rot_part(elementary(Axis::Ry, rpy[1])) *
         rot_part(elementary(Axis::Rz, rpy[0]));
}

Vec3 rotation_log(const Mat3& r) {
  const Vec3 li(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double tr = r.trace();
  const double ln = li.norm();
  if (ln > 1e-12) {
    return std::atan2(ln, tr - 1.0) * li / ln;
  }
  if (tr > 0.0) {
    // identity up to round-off
    return 0.5 * li;
  }
  // theta == pi
  const Vec3 d = 0.5 * (r.diagonal() + Vec3::Ones());
  int k = 0;
  d.maxCoeff(&k);
  Vec3 axis = 0.5 * (r.col(k) + Vec3::Unit(k));
  axis /= axis.norm();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(axis[i]) > 1e-12) {
      if (axis[i] < 0.0) axis = -axis;
      break;
    }
  }
  return M_PI * axis;
}

Vec6 angle_axis_error(const Mat4& te, const Mat4& td) {
  Vec6 e;
  e.head<3>() = trans_part(td) - trans_part(te);
  e.tail<3>() = rotation_log(rot_part(td) * rot_part(te).transpose());
  return e;
}

MatX pinv(const MatX& a, double rel_tol) {
  if (a.size() == 0) return MatX::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? s[0] * rel_tol : 0.0;
  VecX inv = VecX::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff && s[i] > 0.0) inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int rank(const MatX& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<MatX> svd(a);
  const auto& s = svd.singularValues();
  const double cutoff = s[0] * rel_tol;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff && s[i] > 0.0) ++r;
  }
  return r;
}

bool is_valid_pose(const Mat4& t, double tol) {
  const Mat3 r = rot_part(t);
  if (!t.allFinite()) return false;
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(r.determinant() - 1.0) > tol) return false;
  return (t.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace dkt

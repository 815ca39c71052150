#include "dkt/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dkt/errors.hpp"

namespace dkt {

Mat6X jacobian(const Ets& ets, const VecX& q) {
  if (q.size() != ets.n()) throw DimensionError("jacobian: q length mismatch");
  const int n = ets.n();
  const int m = ets.size();
  // suffix[i] = E_i ... E_{M-1}
  std::vector<Mat4> suffix(m + 1, Mat4::Identity());
  for (int i = m - 1; i >= 0; --i) suffix[i] = ets.eval(i, q) * suffix[i + 1];
  const Mat3 rt = rot_part(suffix[0]).transpose();

  Mat6X j(6, n);
  Mat4 prefix = Mat4::Identity();
  int i = 0;
  for (int c = 0; c < n; ++c) {
    const int mc = ets.mu(c);
    for (; i < mc; ++i) prefix = prefix * ets.eval(i, q);
    const Mat4 dt = prefix * generator(ets[mc].axis) * suffix[mc];
    j.block<3, 1>(0, c) = trans_part(dt);
    j.block<3, 1>(3, c) = vex(rot_part(dt) * rt);
  }
  return j;
}

Hessian hessian_naive(const Ets& ets, const VecX& q) {
  const int n = ets.n();
  const Mat4 t = fkine(ets, q);
  const Mat3 rt = rot_part(t).transpose();
  std::vector<Mat3> dr(n);
  for (int c = 0; c < n; ++c) dr[c] = rot_part(partial_fkine(ets, q, c));

  Hessian h(n, Mat6X::Zero(6, n));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < n; ++c) {
      const Mat4 d2 = second_partial_fkine(ets, q, c, i);
      h[i].block<3, 1>(0, c) = trans_part(d2);
      h[i].block<3, 1>(3, c) = vex(rot_part(d2) * rt + dr[c] * dr[i].transpose());
    }
  }
  return h;
}

Hessian hessian_fast(const Mat6X& j) {
  const int n = static_cast<int>(j.cols());
  Hessian h(n, Mat6X::Zero(6, n));
  for (int i = 0; i < n; ++i) {
    const Vec3 wi = j.block<3, 1>(3, i);
    for (int c = 0; c < n; ++c) {
      const int a = std::min(i, c);
      const int b = std::max(i, c);
      const Vec3 wa = j.block<3, 1>(3, a);
      const Vec3 vb = j.block<3, 1>(0, b);
      h[i].block<3, 1>(0, c) = wa.cross(vb);
      if (i < c) h[i].block<3, 1>(3, c) = wi.cross(Vec3(j.block<3, 1>(3, c)));
    }
  }
  return h;
}

Hessian hessian_fast(const Ets& ets, const VecX& q) { return hessian_fast(jacobian(ets, q)); }

Mat6X contract(const Hessian& h, const VecX& qd) {
  if (static_cast<Eigen::Index>(h.size()) != qd.size()) throw DimensionError("contract: qd length mismatch");
  const Eigen::Index n = qd.size();
  Mat6X out = Mat6X::Zero(6, n);
  for (Eigen::Index i = 0; i < n; ++i) out += h[i] * qd[i];
  return out;
}

Mat6X jacobian_dot(const Ets& ets, const VecX& q, const VecX& qd) {
  if (qd.size() != ets.n()) throw DimensionError("jacobian_dot: qd length mismatch");
  return contract(hessian_fast(ets, q), qd);
}

// ---------------------------------------------------------------------------
// Higher orders

KinDerivative::KinDerivative(int order, int n) : order_(order), n_(n) {
  std::size_t count = 1;
  for (int k = 0; k < order - 1; ++k) count *= static_cast<std::size_t>(n);
  data_.assign(count, Mat6X::Zero(6, n));
}

std::size_t KinDerivative::flat(std::initializer_list<int> idx) const {
  if (static_cast<int>(idx.size()) != order_ - 1) throw DimensionError("KinDerivative: wrong index count");
  std::size_t f = 0;
  for (int v : idx) {
    if (v < 0 || v >= n_) throw IndexError("KinDerivative: index out of range");
    f = f * n_ + v;
  }
  return f;
}

const Mat6X& KinDerivative::at(std::initializer_list<int> idx) const { return data_[flat(idx)]; }
Mat6X& KinDerivative::at(std::initializer_list<int> idx) { return data_[flat(idx)]; }

std::vector<Mat6X> KinDerivative::contract_outer(const VecX& qd) const {
  if (qd.size() != n_) throw DimensionError("contract_outer: qd length mismatch");
  const std::size_t inner = data_.size() / n_;
  std::vector<Mat6X> out(inner, Mat6X::Zero(6, n_));
  for (int o = 0; o < n_; ++o) {
    for (std::size_t k = 0; k < inner; ++k) out[k] += qd[o] * data_[o * inner + k];
  }
  return out;
}

namespace {

// Mixed partial derivatives of the Jacobian columns. The first derivatives
//   dw_c/dq_l = [l < c] w_l x w_c,   dv_c/dq_l = w_min(l,c) x v_max(l,c)
// are differentiated further by the Leibniz rule. S is a sorted multiset.
class ColumnDerivatives {
 public:
  explicit ColumnDerivatives(const Mat6X& j) : j_(j) {}

  Vec3 w(int c, const std::vector<int>& s) { return get(c, s).tail<3>(); }
  Vec3 v(int c, const std::vector<int>& s) { return get(c, s).head<3>(); }

  Vec6 get(int c, const std::vector<int>& s) {
    if (s.empty()) return j_.col(c);
    auto key = std::make_pair(c, s);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    const int l = s.back();
    const std::vector<int> rest(s.begin(), s.end() - 1);
    const int a = std::min(l, c);
    const int b = std::max(l, c);
    Vec3 dw = Vec3::Zero();
    Vec3 dv = Vec3::Zero();
    const int m = static_cast<int>(rest.size());
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> sa, sb;
      for (int k = 0; k < m; ++k) ((mask >> k) & 1u ? sa : sb).push_back(rest[k]);
      if (l < c) dw += w(l, sa).cross(w(c, sb));
      dv += w(a, sa).cross(v(b, sb));
    }
    Vec6 out;
    out << dv, dw;
    memo_.emplace(std::move(key), out);
    return out;
  }

 private:
  const Mat6X& j_;
  std::map<std::pair<int, std::vector<int>>, Vec6> memo_;
};

std::vector<int> sorted(std::initializer_list<int> v) {
  std::vector<int> s(v);
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

KinDerivative kin_derivative(const Ets& ets, const VecX& q, int order) {
  if (order < 3 || order > 4) {
    throw UnsupportedOrder("kin_derivative supports orders 3 and 4, got " + std::to_string(order));
  }
  const int n = ets.n();
  const Mat6X j = jacobian(ets, q);
  ColumnDerivatives cd(j);
  KinDerivative d(order, n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      if (order == 3) {
        Mat6X& slot = d.at({l, i});
        for (int c = 0; c < n; ++c) slot.col(c) = cd.get(c, sorted({i, l}));
      } else {
        for (int m = 0; m < n; ++m) {
          Mat6X& slot = d.at({m, l, i});
          for (int c = 0; c < n; ++c) slot.col(c) = cd.get(c, sorted({i, l, m}));
        }
      }
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Roll-pitch-yaw

Mat3 rpy_rate_matrix(const Vec3& rpy) {
  const double sb = std::sin(rpy[1]), cb = std::cos(rpy[1]);
  const double sg = std::sin(rpy[2]), cg = std::cos(rpy[2]);
  Mat3 a;
  a << sb, 0.0, 1.0,
       -cb * sg, cg, 0.0,
       cb * cg, sg, 0.0;
  return a;
}

Mat3 rpy_rate_matrix_dot(const Vec3& rpy, const Vec3& rpy_dot) {
  const double sb = std::sin(rpy[1]), cb = std::cos(rpy[1]);
  const double sg = std::sin(rpy[2]), cg = std::cos(rpy[2]);
  const double bd = rpy_dot[1], gd = rpy_dot[2];
  Mat3 a;
  a << cb * bd, 0.0, 0.0,
       sb * sg * bd - cb * cg * gd, -sg * gd, 0.0,
       -sb * cg * bd - cb * sg * gd, cg * gd, 0.0;
  return a;
}

Vec3 rot_to_rpy(const Mat3& r) {
  const double s = std::clamp(r(0, 2), -1.0, 1.0);
  return Vec3(std::atan2(-r(0, 1), r(0, 0)), std::asin(s), std::atan2(-r(1, 2), r(2, 2)));
}

Mat3 rpy_rate_inverse(const Vec3& rpy) {
  if (std::abs(std::cos(rpy[1])) <= 1e-8) {
    throw RpySingularity("roll-pitch-yaw rate matrix is singular (|cos beta| <= 1e-8)");
  }
  return rpy_rate_matrix(rpy).inverse();
}

Mat6X analytic_jacobian(const Ets& ets, const VecX& q) {
  const Mat6X j = jacobian(ets, q);
  const Mat3 ainv = rpy_rate_inverse(rot_to_rpy(rot_part(fkine(ets, q))));
  Mat6X ja = j;
  ja.bottomRows<3>() = ainv * j.bottomRows<3>();
  return ja;
}

Mat6X analytic_jacobian_dot(const Ets& ets, const VecX& q, const VecX& qd) {
  if (qd.size() != ets.n()) throw DimensionError("analytic_jacobian_dot: qd length mismatch");
  const Mat6X j = jacobian(ets, q);
  const Mat6X jd = contract(hessian_fast(j), qd);
  const Vec3 rpy = rot_to_rpy(rot_part(fkine(ets, q)));
  const Mat3 ainv = rpy_rate_inverse(rpy);
  const Vec3 rpy_dot = ainv * (j.bottomRows<3>() * qd);
  const Mat3 ainv_dot = -ainv * rpy_rate_matrix_dot(rpy, rpy_dot) * ainv;
  Mat6X out = jd;
  out.bottomRows<3>() = ainv_dot * j.bottomRows<3>() + ainv * jd.bottomRows<3>();
  return out;
}

}  // namespace dkt

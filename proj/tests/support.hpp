#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dkt/ets.hpp"
#include "dkt/ik.hpp"
#include "dkt/kinematics.hpp"
#include "dkt/manipulability.hpp"

namespace dkt::test {

inline constexpr double kPi = 3.14159265358979323846;

inline ElementaryTransform fx(Axis a, double v) { return ElementaryTransform::fixed(a, v); }
inline ElementaryTransform jt(Axis a, int j) { return ElementaryTransform::variable(a, j); }

inline RobotModel make_model(const std::string& name, std::vector<ElementaryTransform> ts) {
  Ets ets(std::move(ts));
  const int n = ets.n();
  return RobotModel(name, ets, VecX::Constant(n, -kPi), VecX::Constant(n, kPi));
}

// Rz q0, tx l1, Rz q1, tx l2
inline RobotModel planar2r(double l1 = 1.0, double l2 = 1.0) {
  return make_model("planar2r", {jt(Axis::Rz, 0), fx(Axis::tx, l1), jt(Axis::Rz, 1), fx(Axis::tx, l2)});
}

// Three links in the xy plane; straight (singular) at q = 0.
inline RobotModel planar3r(double l1 = 1.0, double l2 = 1.0, double l3 = 0.5) {
  return make_model("planar3r", {jt(Axis::Rz, 0), fx(Axis::tx, l1), jt(Axis::Rz, 1), fx(Axis::tx, l2),
                                 jt(Axis::Rz, 2), fx(Axis::tx, l3)});
}

// n revolute joints cycling Rz, Ry, Rx with link offsets in between.
inline RobotModel revolute_chain(int n) {
  std::vector<ElementaryTransform> ts;
  const Axis axes[] = {Axis::Rz, Axis::Ry, Axis::Rx};
  for (int i = 0; i < n; ++i) {
    ts.push_back(jt(axes[i % 3], i));
    ts.push_back(fx(Axis::tx, 0.1 + 0.01 * (i % 5)));
    ts.push_back(fx(Axis::tz, 0.05));
  }
  return make_model("chain" + std::to_string(n), ts);
}

// Mixes prismatic and revolute joints and constant rotations.
inline RobotModel mixed_chain() {
  return make_model("mixed", {fx(Axis::tz, 0.3), jt(Axis::Rz, 0), jt(Axis::ty, 1), fx(Axis::Rx, 0.4),
                              jt(Axis::Ry, 2), fx(Axis::tx, 0.2), jt(Axis::tz, 3), jt(Axis::Rx, 4),
                              fx(Axis::Rz, -0.7), fx(Axis::ty, 0.15), jt(Axis::Rz, 5), fx(Axis::tx, 0.1)});
}

inline std::vector<RobotModel> library_models() {
  return {builtin_model("ur5"), builtin_model("panda"), builtin_model("narrow7")};
}

inline VecX sample_q(const RobotModel& m, std::mt19937_64& rng) { return random_q(m, rng); }

// Central differences of position and of the rotation (vex(dR R^T)).
inline Mat6X fd_jacobian(const Ets& ets, const VecX& q, double h = 1e-6) {
  Mat6X j(6, ets.n());
  const Mat3 rt = rot_part(fkine(ets, q)).transpose();
  for (int i = 0; i < ets.n(); ++i) {
    VecX qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    const Mat4 d = (fkine(ets, qp) - fkine(ets, qm)) / (2.0 * h);
    j.block<3, 1>(0, i) = trans_part(d);
    j.block<3, 1>(3, i) = vex(rot_part(d) * rt);
  }
  return j;
}

inline Hessian fd_hessian(const Ets& ets, const VecX& q, double h = 1e-6) {
  Hessian out(ets.n());
  for (int i = 0; i < ets.n(); ++i) {
    VecX qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    out[i] = (jacobian(ets, qp) - jacobian(ets, qm)) / (2.0 * h);
  }
  return out;
}

inline double max_abs_diff(const Hessian& a, const Hessian& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return d;
}

inline VecX fd_gradient(const std::function<double(const VecX&)>& f, const VecX& q, double h = 1e-6) {
  VecX g(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    VecX qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    g[i] = (f(qp) - f(qm)) / (2.0 * h);
  }
  return g;
}

}  // namespace dkt::test

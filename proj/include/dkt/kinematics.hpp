#pragma once

#include <initializer_list>
#include <vector>

#include "dkt/ets.hpp"

namespace dkt {

/// n slices H_i = dJ/dq_i, each 6 x n. Rows 0-2 translational, 3-5 rotational.
using Hessian = std::vector<Mat6X>;

/// World-frame geometric Jacobian, translational rows first.
Mat6X jacobian(const Ets& ets, const VecX& q);

/// Hessian from second partials of the pose. O(n^3) products of the full sequence.
Hessian hessian_naive(const Ets& ets, const VecX& q);

/// Hessian from the columns of J alone. Slice i, column j:
///   translational  Jw_min(i,j) x Jv_max(i,j)
///   rotational     Jw_i x Jw_j for i < j, otherwise exactly zero.
Hessian hessian_fast(const Mat6X& j);
Hessian hessian_fast(const Ets& ets, const VecX& q);

inline Hessian hessian(const Ets& ets, const VecX& q) { return hessian_fast(ets, q); }

/// Sum_i H_i * qd_i.
Mat6X contract(const Hessian& h, const VecX& qd);

/// dJ/dt = Sum_i H_i qd_i.
Mat6X jacobian_dot(const Ets& ets, const VecX& q, const VecX& qd);

/// Derivative tensor of order k (3 or 4). Order 3 holds dH_i/dq_l at
/// (l, i); order 4 holds d^2 H_i/(dq_l dq_m) at (m, l, i). Each entry is 6 x n.
class KinDerivative {
 public:
  KinDerivative(int order, int n);

  int order() const noexcept { return order_; }
  int n() const noexcept { return n_; }

  /// idx has order - 1 entries, outermost first, slice index last.
  const Mat6X& at(std::initializer_list<int> idx) const;
  Mat6X& at(std::initializer_list<int> idx);

  /// Contracts the outermost index against qd. Order 3 yields a Hessian
  /// (as a one-level-lower tensor stored flat).
  std::vector<Mat6X> contract_outer(const VecX& qd) const;

  const std::vector<Mat6X>& data() const noexcept { return data_; }

 private:
  std::size_t flat(std::initializer_list<int> idx) const;

  int order_;
  int n_;
  std::vector<Mat6X> data_;
};

/// Throws UnsupportedOrder unless 3 <= order <= 4.
KinDerivative kin_derivative(const Ets& ets, const VecX& q, int order);

/// A(Gamma) with omega = A * Gamma_dot for Gamma = (alpha, beta, gamma) and
/// R = Rx(gamma) Ry(beta) Rz(alpha).
Mat3 rpy_rate_matrix(const Vec3& rpy);

/// dA/dt for the given angles and rates.
Mat3 rpy_rate_matrix_dot(const Vec3& rpy, const Vec3& rpy_dot);

/// A^-1. Throws RpySingularity when |cos beta| <= 1e-8.
Mat3 rpy_rate_inverse(const Vec3& rpy);

/// Principal-branch angles: beta = asin(R02) in [-pi/2, pi/2].
Vec3 rot_to_rpy(const Mat3& r);

/// blockdiag(I, A^-1) * J. Throws RpySingularity when |cos beta| <= 1e-8.
Mat6X analytic_jacobian(const Ets& ets, const VecX& q);

/// Time derivative of analytic_jacobian along qd.
Mat6X analytic_jacobian_dot(const Ets& ets, const VecX& q, const VecX& qd);

inline Mat6X jacobian(const RobotModel& m, const VecX& q) { return jacobian(m.ets(), q); }
inline Hessian hessian(const RobotModel& m, const VecX& q) { return hessian_fast(m.ets(), q); }

}  // namespace dkt

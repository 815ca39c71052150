#pragma once

#include <string_view>

#include "dkt/kinematics.hpp"

namespace dkt {

/// Starting point of the inner Newton iteration.
enum class QrmcSeed { zero, constant, pseudoinverse };

std::string_view seed_name(QrmcSeed s) noexcept;
QrmcSeed parse_seed(std::string_view s);

struct QrmcConfig {
  QrmcSeed seed = QrmcSeed::pseudoinverse;
  double seed_value = 0.1;  // entries of the constant seed
  double inner_tol = 1e-10;
  int inner_max = 50;
};

struct QrmcStep {
  VecX dq;
  int iterations = 0;
  double residual = 0.0;  // |g(dq)|
  int rank = 0;           // rank of J~ at dq
  bool converged = false;
};

/// g = J dq + 1/2 (H dq) dq - dx, where H dq = sum_i H_i dq_i.
Vec6 taylor_residual(const Mat6X& j, const Hessian& h, const VecX& dq, const Vec6& dx);
Vec6 taylor_residual(const Ets& ets, const VecX& q, const VecX& dq, const Vec6& dx);

/// J~ = J + H dq.
Mat6X qrmc_jacobian(const Mat6X& j, const Hessian& h, const VecX& dq);
Mat6X qrmc_jacobian(const Ets& ets, const VecX& q, const VecX& dq);

/// Newton iteration dq <- dq - pinv(J~) g until |g| < inner_tol. Returns the
/// iterate with the smallest residual when it runs out of iterations.
QrmcStep qrmc_solve(const Ets& ets, const VecX& q, const Vec6& dx, const QrmcConfig& cfg = {});

}  // namespace dkt

#include "dkt/qrmc.hpp"

#include <string>

#include "dkt/errors.hpp"

namespace dkt {

std::string_view seed_name(QrmcSeed s) noexcept {
  switch (s) {
    case QrmcSeed::zero: return "zero";
    case QrmcSeed::constant: return "constant";
    case QrmcSeed::pseudoinverse: return "pseudoinverse";
  }
  return "?";
}

QrmcSeed parse_seed(std::string_view s) {
  if (s == "zero") return QrmcSeed::zero;
  if (s == "constant") return QrmcSeed::constant;
  if (s == "pseudoinverse" || s == "pinv") return QrmcSeed::pseudoinverse;
  throw Error("unknown seed strategy '" + std::string(s) + "'");
}

Vec6 taylor_residual(const Mat6X& j, const Hessian& h, const VecX& dq, const Vec6& dx) {
  return j * dq + 0.5 * (contract(h, dq) * dq) - dx;
}

Vec6 taylor_residual(const Ets& ets, const VecX& q, const VecX& dq, const Vec6& dx) {
  const Mat6X j = jacobian(ets, q);
  return taylor_residual(j, hessian_fast(j), dq, dx);
}

Mat6X qrmc_jacobian(const Mat6X& j, const Hessian& h, const VecX& dq) { return j + contract(h, dq); }

Mat6X qrmc_jacobian(const Ets& ets, const VecX& q, const VecX& dq) {
  const Mat6X j = jacobian(ets, q);
  return qrmc_jacobian(j, hessian_fast(j), dq);
}

QrmcStep qrmc_solve(const Ets& ets, const VecX& q, const Vec6& dx, const QrmcConfig& cfg) {
  const int n = ets.n();
  const Mat6X j = jacobian(ets, q);
  const Hessian h = hessian_fast(j);

  VecX dq;
  switch (cfg.seed) {
    case QrmcSeed::zero: dq = VecX::Zero(n); break;
    case QrmcSeed::constant: dq = VecX::Constant(n, cfg.seed_value); break;
    case QrmcSeed::pseudoinverse: dq = pinv(j) * dx; break;
  }

  QrmcStep best;
  Vec6 g = taylor_residual(j, h, dq, dx);
  best.dq = dq;
  best.residual = g.norm();
  int it = 0;
  // The seed is only kept if no iteration runs.
  while (g.norm() >= cfg.inner_tol && it < cfg.inner_max) {
    dq -= pinv(qrmc_jacobian(j, h, dq)) * g;
    ++it;
    g = taylor_residual(j, h, dq, dx);
    if (it == 1 || g.norm() < best.residual) {
      best.dq = dq;
      best.residual = g.norm();
    }
  }
  best.iterations = it;
  best.converged = best.residual < cfg.inner_tol;
  best.rank = rank(qrmc_jacobian(j, h, best.dq));
  return best;
}

}  // namespace dkt

#include "dkt/velocity_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dkt/errors.hpp"

namespace dkt {

DamperRows velocity_damper_rows(const RobotModel& model, const VecX& q, const DamperConfig& cfg) {
  const int n = model.n();
  if (q.size() != n) throw DimensionError("velocity_damper_rows: q length mismatch");
  if (!(cfg.rho_s < cfg.rho_i)) throw Error("damper requires rho_s < rho_i");
  std::vector<std::pair<int, double>> rows;  // signed joint (+1 based), bound
  const double scale = cfg.eta / (cfg.rho_i - cfg.rho_s);
  for (int i = 0; i < n; ++i) {
    const double up = model.q_max()[i] - q[i];
    const double lo = q[i] - model.q_min()[i];
    if (up < cfg.rho_i) rows.emplace_back(i + 1, scale * (up - cfg.rho_s));
    if (lo < cfg.rho_i) rows.emplace_back(-(i + 1), scale * (lo - cfg.rho_s));
  }
  DamperRows out;
  out.A = MatX::Zero(rows.size(), n);
  out.b = VecX(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int j = std::abs(rows[r].first) - 1;
    out.A(r, j) = rows[r].first > 0 ? 1.0 : -1.0;
    out.b[r] = rows[r].second;
  }
  return out;
}

std::string_view controller_name(Controller c) noexcept {
  switch (c) {
    case Controller::rrmc: return "rrmc";
    case Controller::park: return "park";
    case Controller::qp_rrmc: return "qp-rrmc";
    case Controller::qp_park: return "qp";
    case Controller::qp_slack: return "qp-slack";
    case Controller::qrmc: return "qrmc";
  }
  return "?";
}

Controller parse_controller(std::string_view s) {
  for (Controller c : {Controller::rrmc, Controller::park, Controller::qp_rrmc, Controller::qp_park,
                       Controller::qp_slack, Controller::qrmc}) {
    if (controller_name(c) == s) return c;
  }
  throw Error("unknown controller '" + std::string(s) + "' (valid: rrmc, park, qp-rrmc, qp, qp-slack, qrmc)");
}

double slack_weight(double err_norm, double kappa) {
  if (!(err_norm > 0.0)) return 1e4;
  return std::clamp(kappa / err_norm, 1.0, 1e4);
}

Vec6 pbs_velocity(const Mat4& te, const Mat4& td, double k, const Vec6& k_diag) {
  return k * k_diag.cwiseProduct(angle_axis_error(te, td));
}

VecX rrmc(const Mat6X& j, const Vec6& nu) { return pinv(j) * nu; }

VecX rrmc(const RobotModel& model, const VecX& q, const Vec6& nu) { return rrmc(jacobian(model, q), nu); }

MatX nullspace_projector(const MatX& j) {
  return MatX::Identity(j.cols(), j.cols()) - pinv(j) * j;
}

VecX park_controller(const RobotModel& model, const VecX& q, const Vec6& nu, const ControllerConfig& cfg) {
  const Mat6X j = jacobian(model, q);
  const VecX jm = manipulability_jacobian(j, hessian_fast(j), cfg.axes);
  const MatX jp = pinv(j);
  const int n = model.n();
  return jp * nu + (MatX::Identity(n, n) - jp * j) * jm / cfg.lambda;
}

namespace {

// J_m, or zero where the gradient is undefined.
VecX safe_jm(const Mat6X& j, Axes axes) {
  try {
    return manipulability_jacobian(j, hessian_fast(j), axes);
  } catch (const SingularGram&) {
    return VecX::Zero(j.cols());
  }
}

void velocity_bounds(const RobotModel& model, const ControllerConfig& cfg, VecX& lower, VecX& upper) {
  const int n = model.n();
  const double inf = std::numeric_limits<double>::infinity();
  lower = VecX::Constant(n, -inf);
  upper = VecX::Constant(n, inf);
  if (cfg.velocity_limits) {
    lower = -model.qd_max();
    upper = model.qd_max();
  }
}

QpVelocity finish(const QpSolution& s, int n) {
  QpVelocity out;
  out.status = s.status;
  out.kkt = s.kkt;
  out.qd = s.x.head(n);
  if (s.x.size() >= n + 6) out.delta = s.x.segment<6>(n);
  return out;
}

}  // namespace

QpVelocity qp_rrmc(const RobotModel& model, const VecX& q, const Vec6& nu, const VecX& lower, const VecX& upper) {
  const int n = model.n();
  QpProblem p;
  p.Q = MatX::Identity(n, n);
  p.c = VecX::Zero(n);
  p.A_eq = jacobian(model, q);
  p.b_eq = nu;
  p.lower = lower;
  p.upper = upper;
  return finish(solve(p), n);
}

QpVelocity qp_park(const RobotModel& model, const VecX& q, const Vec6& nu, const ControllerConfig& cfg) {
  const int n = model.n();
  const Mat6X j = jacobian(model, q);
  QpProblem p;
  p.Q = MatX::Identity(n, n);
  p.c = -safe_jm(j, cfg.axes) / cfg.lambda;
  p.A_eq = j;
  p.b_eq = nu;
  int dampers = 0;
  if (cfg.dampers) {
    DamperRows d = velocity_damper_rows(model, q, cfg.damper);
    dampers = d.count();
    p.A_in = std::move(d.A);
    p.b_in = std::move(d.b);
  }
  velocity_bounds(model, cfg, p.lower, p.upper);
  QpVelocity out = finish(solve(p), n);
  out.dampers = dampers;
  return out;
}

QpVelocity qp_slack_controller(const RobotModel& model, const VecX& q, const Vec6& nu, const ControllerConfig& cfg,
                               double err_norm, double lambda_delta) {
  const int n = model.n();
  const int d = n + 6;
  const Mat6X j = jacobian(model, q);
  const double ld = lambda_delta > 0.0 ? lambda_delta : slack_weight(err_norm, cfg.kappa);

  QpProblem p;
  p.Q = MatX::Zero(d, d);
  p.Q.topLeftCorner(n, n).diagonal().setConstant(cfg.lambda_q);
  p.Q.bottomRightCorner(6, 6).diagonal().setConstant(ld);
  p.c = VecX::Zero(d);
  p.c.head(n) = -safe_jm(j, cfg.axes) / cfg.lambda;
  p.A_eq = MatX::Zero(6, d);
  p.A_eq.leftCols(n) = j;
  p.A_eq.rightCols(6) = MatX::Identity(6, 6);
  p.b_eq = nu;
  int dampers = 0;
  if (cfg.dampers) {
    DamperRows dr = velocity_damper_rows(model, q, cfg.damper);
    dampers = dr.count();
    p.A_in = MatX::Zero(dr.count(), d);
    p.A_in.leftCols(n) = dr.A;
    p.b_in = std::move(dr.b);
  }
  VecX lo, hi;
  velocity_bounds(model, cfg, lo, hi);
  p.lower = VecX(d);
  p.upper = VecX(d);
  p.lower << lo, VecX::Constant(6, -cfg.slack_bound);
  p.upper << hi, VecX::Constant(6, cfg.slack_bound);

  QpVelocity out = finish(solve(p), n);
  out.dampers = dampers;
  out.lambda_delta = ld;
  return out;
}

}  // namespace dkt

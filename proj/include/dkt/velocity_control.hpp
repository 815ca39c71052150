#pragma once

#include <string_view>

#include "dkt/ets.hpp"
#include "dkt/manipulability.hpp"
#include "dkt/qp.hpp"

namespace dkt {

/// Velocity damper q_dot <= eta (rho - rho_s) / (rho_i - rho_s), active while
/// the distance rho to a limit is below rho_i.
struct DamperConfig {
  double eta = 1.0;
  double rho_i = 0.3;
  double rho_s = 0.05;
};

struct DamperRows {
  MatX A;  // k x n, rows are +e_i (upper limit) or -e_i (lower limit)
  VecX b;
  int count() const noexcept { return static_cast<int>(b.size()); }
};

/// One row per joint and limit whose distance is inside rho_i.
DamperRows velocity_damper_rows(const RobotModel& model, const VecX& q, const DamperConfig& cfg);

enum class Controller { rrmc, park, qp_rrmc, qp_park, qp_slack, qrmc };

std::string_view controller_name(Controller c) noexcept;
/// Accepts rrmc, park, qp-rrmc, qp (manipulability QP), qp-slack, qrmc.
Controller parse_controller(std::string_view s);

struct ControllerConfig {
  Controller variant = Controller::rrmc;
  double k = 1.0;              // position-based servoing gain
  Vec6 k_diag = Vec6::Ones();  // per-axis scale of k
  double lambda = 1.0;         // null-space gain: q_null = P J_m / lambda
  double lambda_q = 0.01;
  double kappa = 10.0;         // slack weight schedule
  double slack_bound = 10.0;   // |delta_i| limit
  bool dampers = true;
  bool velocity_limits = true;
  DamperConfig damper;
  Axes axes = Axes::rotational;
};

/// Slack weight: clamp(kappa / |e|, 1, 1e4). Slack gets dearer as the goal approaches.
double slack_weight(double err_norm, double kappa);

/// nu = k * diag(k_diag) * angle_axis_error(te, td).
Vec6 pbs_velocity(const Mat4& te, const Mat4& td, double k, const Vec6& k_diag = Vec6::Ones());

VecX rrmc(const Mat6X& j, const Vec6& nu);
VecX rrmc(const RobotModel& model, const VecX& q, const Vec6& nu);

/// I - J^+ J.
MatX nullspace_projector(const MatX& j);

/// J^+ nu + (I - J^+ J) J_m / lambda. Throws SingularGram from J_m.
VecX park_controller(const RobotModel& model, const VecX& q, const Vec6& nu, const ControllerConfig& cfg);

struct QpVelocity {
  VecX qd;
  Vec6 delta = Vec6::Zero();
  QpStatus status = QpStatus::optimal;
  int dampers = 0;
  double lambda_delta = 0.0;
  KktResiduals kkt;
};

/// min 1/2 |qd|^2 subject to J qd = nu and lower <= qd <= upper.
QpVelocity qp_rrmc(const RobotModel& model, const VecX& q, const Vec6& nu, const VecX& lower, const VecX& upper);

/// min 1/2 |qd|^2 - J_m^T qd / lambda subject to J qd = nu, dampers and
/// velocity limits.
QpVelocity qp_park(const RobotModel& model, const VecX& q, const Vec6& nu, const ControllerConfig& cfg);

/// Slack-augmented QP over x = (qd, delta):
///   min 1/2 x^T diag(lambda_q I, lambda_delta I) x - J_m^T qd
///   s.t. J qd + delta = nu, dampers, velocity and slack bounds.
/// lambda_delta <= 0 selects the schedule slack_weight(err_norm, kappa).
QpVelocity qp_slack_controller(const RobotModel& model, const VecX& q, const Vec6& nu,
                               const ControllerConfig& cfg, double err_norm, double lambda_delta = 0.0);

}  // namespace dkt

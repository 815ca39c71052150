#include "dkt/servo.hpp"

#include <cmath>

#include "dkt/errors.hpp"

namespace dkt {

std::string_view status_name(ServoStatus s) noexcept {
  switch (s) {
    case ServoStatus::running: return "running";
    case ServoStatus::arrived: return "arrived";
    case ServoStatus::timeout: return "timeout";
    case ServoStatus::local_minimum: return "local_minimum";
    case ServoStatus::failed: return "failed";
  }
  return "?";
}

ServoTrace servo_simulate(const RobotModel& model, const VecX& q0, const Mat4& td, const ControllerConfig& cfg,
                          const ServoOptions& opts) {
  const int n = model.n();
  if (q0.size() != n) throw DimensionError("servo: q0 length mismatch");
  if (!(opts.dt > 0.0)) throw Error("servo: dt must be positive");

  ServoTrace trace;
  trace.controller = std::string(controller_name(cfg.variant));
  trace.n = n;
  trace.dt = opts.dt;

  VecX q = q0;
  std::vector<double> errs;
  for (long tick = 0;; ++tick) {
    ServoRecord rec;
    rec.t = static_cast<double>(tick) * opts.dt;
    rec.q = q;
    rec.qd = VecX::Zero(n);
    const Mat6X j = jacobian(model, q);
    const Vec6 e = angle_axis_error(fkine(model.ets(), q), td);
    rec.err = e.norm();
    rec.m_rot = manipulability(j, Axes::rotational);
    rec.m_trans = manipulability(j, Axes::translational);
    errs.push_back(rec.err);

    auto stop = [&](ServoStatus s) {
      rec.status = s;
      trace.records.push_back(rec);
      trace.status = s;
      return trace;
    };
    if (rec.err < opts.arrive_tol) return stop(ServoStatus::arrived);
    if (rec.t >= opts.max_t - 1e-12) return stop(ServoStatus::timeout);
    const auto w = static_cast<std::size_t>(opts.stall_window);
    if (errs.size() > w && errs[errs.size() - 1 - w] - rec.err < opts.stall_tol) {
      return stop(ServoStatus::local_minimum);
    }

    const Vec6 nu = cfg.k * cfg.k_diag.cwiseProduct(e);
    try {
      switch (cfg.variant) {
        case Controller::rrmc:
          rec.qd = rrmc(j, nu);
          break;
        case Controller::park:
          rec.qd = park_controller(model, q, nu, cfg);
          break;
        case Controller::qp_rrmc:
        case Controller::qp_park:
        case Controller::qp_slack: {
          QpVelocity v;
          if (cfg.variant == Controller::qp_slack) {
            v = qp_slack_controller(model, q, nu, cfg, rec.err);
          } else if (cfg.variant == Controller::qp_park) {
            v = qp_park(model, q, nu, cfg);
          } else {
            VecX lo = -model.qd_max(), hi = model.qd_max();
            v = qp_rrmc(model, q, nu, lo, hi);
          }
          if (v.status != QpStatus::optimal) {
            trace.message = "QP " + std::string(status_name(v.status));
            return stop(ServoStatus::failed);
          }
          rec.qd = v.qd;
          rec.delta = v.delta;
          rec.dampers = v.dampers;
          rec.lambda_delta = v.lambda_delta;
          break;
        }
        case Controller::qrmc: {
          const QrmcStep s = qrmc_solve(model.ets(), q, nu * opts.dt, opts.qrmc);
          rec.qd = s.dq / opts.dt;
          break;
        }
      }
    } catch (const Error& ex) {
      trace.message = ex.what();
      return stop(ServoStatus::failed);
    }
    rec.task_residual = (j * rec.qd + rec.delta - nu).cwiseAbs().maxCoeff();
    trace.records.push_back(rec);
    q += rec.qd * opts.dt;
  }
}

ServoTrace qrmc_servo(const RobotModel& model, const VecX& q0, const Mat4& td, const ControllerConfig& cfg,
                      const ServoOptions& opts) {
  ControllerConfig c = cfg;
  c.variant = Controller::qrmc;
  return servo_simulate(model, q0, td, c, opts);
}

}  // namespace dkt

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dkt/qrmc.hpp"
#include "dkt/velocity_control.hpp"

namespace dkt {

enum class ServoStatus { running, arrived, timeout, local_minimum, failed };

std::string_view status_name(ServoStatus s) noexcept;

struct ServoOptions {
  double dt = 0.02;
  double max_t = 10.0;
  double arrive_tol = 1e-3;
  int stall_window = 50;
  double stall_tol = 1e-9;
  QrmcConfig qrmc;
};

/// State at one tick. qd is the command applied from t to t + dt (zero on the
/// final record).
struct ServoRecord {
  double t = 0.0;
  VecX q;
  VecX qd;
  double err = 0.0;
  double m_rot = 0.0;
  double m_trans = 0.0;
  Vec6 delta = Vec6::Zero();
  int dampers = 0;
  double lambda_delta = 0.0;
  double task_residual = 0.0;  // |J qd + delta - nu|_inf
  ServoStatus status = ServoStatus::running;
};

struct ServoTrace {
  std::string controller;
  int n = 0;
  double dt = 0.0;
  std::vector<ServoRecord> records;
  ServoStatus status = ServoStatus::running;
  std::string message;  // reason for a failed run

  int ticks() const noexcept { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
  const ServoRecord& final_record() const { return records.back(); }
};

/// Closed-loop kinematic simulation with explicit Euler integration. Stops on
/// arrival, timeout, or when |e| decreased by less than stall_tol over the last
/// stall_window ticks.
ServoTrace servo_simulate(const RobotModel& model, const VecX& q0, const Mat4& td, const ControllerConfig& cfg,
                          const ServoOptions& opts = {});

/// servo_simulate with the quadratic-rate controller.
ServoTrace qrmc_servo(const RobotModel& model, const VecX& q0, const Mat4& td, const ControllerConfig& cfg,
                      const ServoOptions& opts = {});

}  // namespace dkt

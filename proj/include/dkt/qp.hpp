#pragma once

#include <string_view>

#include "dkt/se3.hpp"

namespace dkt {

/// minimize 1/2 x^T Q x + c^T x
/// subject to A_eq x = b_eq, A_in x <= b_in, lower <= x <= upper.
/// Empty matrices mean "no such constraints"; empty bounds mean unbounded.
struct QpProblem {
  MatX Q;
  VecX c;
  MatX A_eq;
  VecX b_eq;
  MatX A_in;
  VecX b_in;
  VecX lower;
  VecX upper;

  int dim() const noexcept { return static_cast<int>(c.size()); }
  double objective(const VecX& x) const { return 0.5 * x.dot(Q * x) + c.dot(x); }
};

enum class QpStatus { optimal, infeasible, max_iter };

std::string_view status_name(QpStatus s) noexcept;

/// Optimality residuals in the infinity norm. Primal residuals are absolute
/// constraint violations; stationarity and complementarity are relative to the
/// magnitude of the terms they balance.
struct KktResiduals {
  double stationarity = 0.0;
  double primal_eq = 0.0;
  double primal_in = 0.0;
  double complementarity = 0.0;

  double max() const noexcept;
};

struct QpSolution {
  VecX x;
  QpStatus status = QpStatus::infeasible;
  int iterations = 0;
  KktResiduals kkt;
};

/// Dual active-set solver (Goldfarb-Idnani). Holds workspaces, so use one
/// instance per thread.
class QpSolver {
 public:
  int max_changes = 200;

  QpSolution solve(const QpProblem& p);

 private:
  MatX normals_;
  VecX offsets_;
};

/// Throws NotPositiveDefinite when Q has no Cholesky factor and DimensionError
/// on inconsistent shapes.
QpSolution solve(const QpProblem& p);

/// Independent certificate for a candidate x. Multipliers of the constraints
/// active at x are recovered by nonnegative least squares.
KktResiduals check_kkt(const QpProblem& p, const VecX& x);

}  // namespace dkt

#pragma once

#include <limits>
#include <optional>
#include <random>

#include "dkt/qp.hpp"

namespace dkt::test {

// Enumerates every subset of inequality rows (bounds included) taken as
// equalities, solves the KKT system and keeps the best feasible point.
inline std::optional<VecX> qp_enumerate(const QpProblem& p, double feas_tol = 1e-9) {
  const int d = p.dim();
  std::vector<VecX> rows;
  std::vector<double> rhs;
  for (Eigen::Index r = 0; r < p.A_in.rows(); ++r) {
    rows.push_back(p.A_in.row(r).transpose());
    rhs.push_back(p.b_in[r]);
  }
  for (Eigen::Index i = 0; i < p.upper.size(); ++i) {
    if (std::isfinite(p.upper[i])) {
      rows.push_back(VecX::Unit(d, i));
      rhs.push_back(p.upper[i]);
    }
  }
  for (Eigen::Index i = 0; i < p.lower.size(); ++i) {
    if (std::isfinite(p.lower[i])) {
      rows.push_back(-VecX::Unit(d, i));
      rhs.push_back(-p.lower[i]);
    }
  }
  const int m = static_cast<int>(rows.size());
  const int me = static_cast<int>(p.A_eq.rows());

  std::optional<VecX> best;
  double best_f = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    int k = 0;
    for (int r = 0; r < m; ++r) k += (mask >> r) & 1u;
    if (me + k > d) continue;
    MatX a(me + k, d);
    VecX b(me + k);
    if (me) {
      a.topRows(me) = p.A_eq;
      b.head(me) = p.b_eq;
    }
    for (int r = 0, s = me; r < m; ++r) {
      if ((mask >> r) & 1u) {
        a.row(s) = rows[r].transpose();
        b[s++] = rhs[r];
      }
    }
    MatX kkt = MatX::Zero(d + a.rows(), d + a.rows());
    kkt.topLeftCorner(d, d) = p.Q;
    kkt.topRightCorner(d, a.rows()) = a.transpose();
    kkt.bottomLeftCorner(a.rows(), d) = a;
    VecX r(d + a.rows());
    r << -p.c, b;
    Eigen::FullPivLU<MatX> lu(kkt);
    if (lu.rank() < kkt.rows()) continue;
    const VecX x = lu.solve(r).head(d);
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) ok = rows[i].dot(x) <= rhs[i] + feas_tol;
    if (me) ok = ok && (p.A_eq * x - p.b_eq).cwiseAbs().maxCoeff() <= feas_tol;
    if (!ok) continue;
    const double f = p.objective(x);
    if (f < best_f) {
      best_f = f;
      best = x;
    }
  }
  return best;
}

// Strictly convex instance with d <= 4 and at most 4 constraints in total.
// Most instances are feasible by construction around a random point.
inline QpProblem random_tiny_qp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  const int d = dim(rng);
  QpProblem p;
  MatX m(d, d);
  for (int i = 0; i < d * d; ++i) m(i / d, i % d) = u(rng);
  p.Q = m.transpose() * m + 0.1 * MatX::Identity(d, d);
  p.c = VecX(d);
  for (int i = 0; i < d; ++i) p.c[i] = 3.0 * u(rng);
  VecX x0(d);
  for (int i = 0; i < d; ++i) x0[i] = u(rng);
  const bool infeasible = pos(rng) < 0.1;

  int budget = std::uniform_int_distribution<int>(0, 4)(rng);
  const int me = std::min({budget, d - 1, std::uniform_int_distribution<int>(0, 1)(rng)});
  budget -= me;
  p.A_eq = MatX(me, d);
  p.b_eq = VecX(me);
  for (int r = 0; r < me; ++r) {
    for (int i = 0; i < d; ++i) p.A_eq(r, i) = u(rng);
    p.b_eq[r] = p.A_eq.row(r).dot(x0);
  }
  const int mb = std::uniform_int_distribution<int>(0, budget)(rng);
  const int mi = budget - mb;
  p.A_in = MatX(mi, d);
  p.b_in = VecX(mi);
  for (int r = 0; r < mi; ++r) {
    for (int i = 0; i < d; ++i) p.A_in(r, i) = u(rng);
    p.b_in[r] = p.A_in.row(r).dot(x0) + 0.3 * pos(rng);
  }
  if (mb) {
    p.lower = VecX::Constant(d, -std::numeric_limits<double>::infinity());
    p.upper = VecX::Constant(d, std::numeric_limits<double>::infinity());
    for (int k = 0; k < mb; ++k) {
      const int i = k % d;
      if (k < d) p.upper[i] = x0[i] + 0.2 * pos(rng);
      else p.lower[i] = x0[i] - 0.2 * pos(rng);
    }
  }
  if (infeasible && mi >= 1) {
    // Contradict the first inequality with a bound along its normal.
    p.A_in.conservativeResize(mi + 1, d);
    p.b_in.conservativeResize(mi + 1);
    p.A_in.row(mi) = -p.A_in.row(0);
    p.b_in[mi] = -p.b_in[0] - 0.5;
  }
  return p;
}

}  // namespace dkt::test

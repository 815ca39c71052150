#include "dkt/qp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dkt/errors.hpp"

namespace dkt {

std::string_view status_name(QpStatus s) noexcept {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::max_iter: return "max_iter";
  }
  return "?";
}

double KktResiduals::max() const noexcept {
  return std::max({stationarity, primal_eq, primal_in, complementarity});
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const QpProblem& p) {
  const Eigen::Index d = p.c.size();
  if (p.Q.rows() != d || p.Q.cols() != d) throw DimensionError("QP: Q must be d x d with d = len(c)");
  if (p.A_eq.size() > 0 && (p.A_eq.cols() != d || p.A_eq.rows() != p.b_eq.size())) {
    throw DimensionError("QP: A_eq/b_eq shape mismatch");
  }
  if (p.A_eq.size() == 0 && p.b_eq.size() != 0) throw DimensionError("QP: b_eq without A_eq");
  if (p.A_in.size() > 0 && (p.A_in.cols() != d || p.A_in.rows() != p.b_in.size())) {
    throw DimensionError("QP: A_in/b_in shape mismatch");
  }
  if (p.A_in.size() == 0 && p.b_in.size() != 0) throw DimensionError("QP: b_in without A_in");
  if (p.lower.size() != 0 && p.lower.size() != d) throw DimensionError("QP: lower bound length mismatch");
  if (p.upper.size() != 0 && p.upper.size() != d) throw DimensionError("QP: upper bound length mismatch");
  if (p.b_eq.size() > d) throw DimensionError("QP: more equality constraints than variables");
  if (p.lower.size() != 0 && p.upper.size() != 0 && (p.lower.array() > p.upper.array()).any()) {
    throw Error("QP: lower bound exceeds upper bound");
  }
  const double qs = p.Q.cwiseAbs().maxCoeff();
  if (d > 0 && (p.Q - p.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, qs)) {
    throw Error("QP: Q is not symmetric");
  }
}

// All constraints as columns n_k with n_k^T x >= b_k, equalities first.
struct StandardForm {
  MatX normals;
  VecX offsets;
  int n_eq = 0;
};

StandardForm standard_form(const QpProblem& p) {
  const int d = p.dim();
  const int n_eq = static_cast<int>(p.b_eq.size());
  const int n_in = static_cast<int>(p.b_in.size());
  int n_bound = 0;
  for (int i = 0; i < p.lower.size(); ++i) n_bound += std::isfinite(p.lower[i]) ? 1 : 0;
  for (int i = 0; i < p.upper.size(); ++i) n_bound += std::isfinite(p.upper[i]) ? 1 : 0;

  StandardForm s;
  s.n_eq = n_eq;
  s.normals = MatX::Zero(d, n_eq + n_in + n_bound);
  s.offsets = VecX::Zero(n_eq + n_in + n_bound);
  int k = 0;
  for (int i = 0; i < n_eq; ++i, ++k) {
    s.normals.col(k) = p.A_eq.row(i).transpose();
    s.offsets[k] = p.b_eq[i];
  }
  for (int i = 0; i < n_in; ++i, ++k) {
    s.normals.col(k) = -p.A_in.row(i).transpose();
    s.offsets[k] = -p.b_in[i];
  }
  for (int i = 0; i < p.lower.size(); ++i) {
    if (!std::isfinite(p.lower[i])) continue;
    s.normals(i, k) = 1.0;
    s.offsets[k++] = p.lower[i];
  }
  for (int i = 0; i < p.upper.size(); ++i) {
    if (!std::isfinite(p.upper[i])) continue;
    s.normals(i, k) = -1.0;
    s.offsets[k++] = -p.upper[i];
  }
  return s;
}

double row_scale(const VecX& n, double b, const VecX& x) {
  return 1.0 + std::abs(b) + n.cwiseAbs().dot(x.cwiseAbs());
}

// Lawson-Hanson: min ||A y - b|| subject to y >= 0.
VecX nnls(const MatX& a, const VecX& b) {
  const int m = static_cast<int>(a.cols());
  VecX y = VecX::Zero(m);
  if (m == 0) return y;
  std::vector<bool> passive(m, false);
  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());

  auto solve_passive = [&]() {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i) {
      if (passive[i]) idx.push_back(i);
    }
    MatX ap(a.rows(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(k) = a.col(idx[k]);
    const VecX sp = ap.colPivHouseholderQr().solve(b);
    VecX s = VecX::Zero(m);
    for (std::size_t k = 0; k < idx.size(); ++k) s[idx[k]] = sp[k];
    return s;
  };

  for (int outer = 0; outer < 3 * m + 10; ++outer) {
    const VecX w = a.transpose() * (b - a * y);
    int t = -1;
    double best = tol;
    for (int i = 0; i < m; ++i) {
      if (!passive[i] && w[i] > best) {
        best = w[i];
        t = i;
      }
    }
    if (t < 0) break;
    passive[t] = true;
    for (int inner = 0; inner < 3 * m + 10; ++inner) {
      const VecX s = solve_passive();
      double alpha = kInf;
      for (int i = 0; i < m; ++i) {
        if (passive[i] && s[i] <= 0.0) alpha = std::min(alpha, y[i] / (y[i] - s[i]));
      }
      if (!std::isfinite(alpha)) {
        y = s;
        break;
      }
      y += alpha * (s - y);
      for (int i = 0; i < m; ++i) {
        if (passive[i] && y[i] <= tol) {
          passive[i] = false;
          y[i] = 0.0;
        }
      }
    }
  }
  return y;
}

}  // namespace

QpSolution QpSolver::solve(const QpProblem& p) {
  validate(p);
  const int d = p.dim();
  QpSolution sol;

  Eigen::LLT<MatX> llt(p.Q);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("QP: Q is not positive definite");
  const MatX l = llt.matrixL();
  auto lower_solve = [&](const VecX& v) -> VecX { return l.triangularView<Eigen::Lower>().solve(v); };
  auto upper_solve = [&](const VecX& v) -> VecX {
    return l.transpose().triangularView<Eigen::Upper>().solve(v);
  };

  StandardForm sf = standard_form(p);
  normals_ = std::move(sf.normals);
  offsets_ = std::move(sf.offsets);
  const int total = static_cast<int>(offsets_.size());

  VecX x = d > 0 ? VecX(-llt.solve(p.c)) : VecX();
  std::vector<int> active;
  VecX u;
  std::vector<bool> is_active(total, false);
  int next_eq = 0;
  int changes = 0;
  [[maybe_unused]] double objective = p.objective(x);

  auto finish = [&](QpStatus status) {
    sol.x = x;
    sol.status = status;
    sol.iterations = changes;
    sol.kkt = check_kkt(p, x);
    return sol;
  };

  while (true) {
    int cp = -1;
    double sp = 0.0;
    if (next_eq < sf.n_eq) {
      cp = next_eq++;
      sp = normals_.col(cp).dot(x) - offsets_[cp];
      if (sp > 0.0) {
        normals_.col(cp) *= -1.0;
        offsets_[cp] *= -1.0;
        sp = -sp;
      }
    } else {
      double worst = 0.0;
      for (int k = sf.n_eq; k < total; ++k) {
        if (is_active[k]) continue;
        const VecX nk = normals_.col(k);
        const double s = nk.dot(x) - offsets_[k];
        if (s < -1e-12 * row_scale(nk, offsets_[k], x) && s < worst) {
          worst = s;
          cp = k;
        }
      }
      if (cp < 0) return finish(QpStatus::optimal);
      sp = worst;
    }

    const VecX np = normals_.col(cp);
    VecX uplus(active.size() + 1);
    uplus << u, 0.0;
    bool added = false;
    while (!added) {
      if (changes >= max_changes) return finish(QpStatus::max_iter);
      const int q = static_cast<int>(active.size());
      const VecX w = lower_solve(np);
      VecX z = VecX::Zero(d);
      VecX r(q);
      double z_norm_ratio = 0.0;
      if (q == 0) {
        z = upper_solve(w);
        z_norm_ratio = 1.0;
      } else {
        MatX m(d, q);
        for (int j = 0; j < q; ++j) m.col(j) = lower_solve(normals_.col(active[j]));
        Eigen::HouseholderQR<MatX> qr(m);
        const MatX qf = qr.householderQ();
        const VecX qtw = qf.transpose() * w;
        r = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(qtw.head(q));
        if (q < d) {
          const VecX v2 = qtw.tail(d - q);
          z = upper_solve(qf.rightCols(d - q) * v2);
          z_norm_ratio = v2.norm() / std::max(w.norm(), 1e-300);
        }
      }

      double t1 = kInf;
      int drop = -1;
      for (int j = 0; j < q; ++j) {
        if (active[j] < sf.n_eq || r[j] <= 1e-14) continue;
        const double ratio = uplus[j] / r[j];
        if (ratio < t1) {
          t1 = ratio;
          drop = j;
        }
      }
      const bool z_zero = z_norm_ratio <= 1e-10;
      const double t2 = z_zero ? kInf : -sp / z.dot(np);
      const double t = std::min(t1, t2);

      if (!std::isfinite(t)) {
        if (cp < sf.n_eq && std::abs(sp) <= 1e-12 * row_scale(np, offsets_[cp], x)) break;
        return finish(QpStatus::infeasible);
      }

      uplus.head(q) -= t * r;
      uplus[q] += t;
      if (!z_zero) x += t * z;
      sp = np.dot(x) - offsets_[cp];

      if (t == t2) {
        active.push_back(cp);
        is_active[cp] = true;
        u = uplus;
        added = true;
      } else {
        is_active[active[drop]] = false;
        active.erase(active.begin() + drop);
        VecX shrunk(uplus.size() - 1);
        shrunk << uplus.head(drop), uplus.tail(uplus.size() - drop - 1);
        uplus = shrunk;
      }
      ++changes;
#ifndef NDEBUG
      const double next = p.objective(x);
      assert(next >= objective - 1e-9 * (1.0 + std::abs(objective)));
      objective = next;
#endif
    }
  }
}

QpSolution solve(const QpProblem& p) {
  QpSolver solver;
  return solver.solve(p);
}

KktResiduals check_kkt(const QpProblem& p, const VecX& x) {
  validate(p);
  const int d = p.dim();
  if (x.size() != d) throw DimensionError("check_kkt: x length mismatch");
  KktResiduals res;

  const VecX qx = p.Q * x;
  const VecX grad = qx + p.c;

  for (int i = 0; i < p.b_eq.size(); ++i) {
    const VecX a = p.A_eq.row(i).transpose();
    res.primal_eq = std::max(res.primal_eq, std::abs(a.dot(x) - p.b_eq[i]));
  }

  // Inequalities in a^T x <= b form, with slack b - a^T x.
  std::vector<VecX> rows;
  std::vector<double> slack;
  auto add_row = [&](const VecX& a, double b) {
    const double s = b - a.dot(x);
    const double scale = row_scale(a, b, x);
    res.primal_in = std::max(res.primal_in, std::max(0.0, -s));
    if (s <= 1e-9 * scale) {
      rows.push_back(a);
      slack.push_back(s);
    }
  };
  for (int i = 0; i < p.b_in.size(); ++i) add_row(p.A_in.row(i).transpose(), p.b_in[i]);
  for (int i = 0; i < p.lower.size(); ++i) {
    if (std::isfinite(p.lower[i])) add_row(-VecX::Unit(d, i), -p.lower[i]);
  }
  for (int i = 0; i < p.upper.size(); ++i) {
    if (std::isfinite(p.upper[i])) add_row(VecX::Unit(d, i), p.upper[i]);
  }

  // grad + A_eq^T lambda + G^T mu = 0 with mu >= 0. Project out the range of
  // A_eq^T, fit mu by NNLS, then lambda by least squares.
  MatX proj = MatX::Identity(d, d);
  if (p.b_eq.size() > 0) {
    const MatX et = p.A_eq.transpose();
    proj -= et * pinv(et);
  }
  MatX g(d, rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) g.col(k) = rows[k];
  const VecX mu = nnls(proj * g, -(proj * grad));
  VecX partial = grad + g * mu;
  VecX total = partial;
  double mult_scale = 0.0;
  if (p.b_eq.size() > 0) {
    const MatX et = p.A_eq.transpose();
    const VecX lambda = pinv(et) * (-partial);
    total += et * lambda;
    for (int i = 0; i < lambda.size(); ++i) {
      mult_scale = std::max(mult_scale, std::abs(lambda[i]) * et.col(i).cwiseAbs().maxCoeff());
    }
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    mult_scale = std::max(mult_scale, mu[k] * rows[k].cwiseAbs().maxCoeff());
    res.complementarity = std::max(res.complementarity, mu[k] * std::abs(slack[k]));
  }
  const double stat_scale =
      1.0 + std::max({qx.size() ? qx.cwiseAbs().maxCoeff() : 0.0, p.c.size() ? p.c.cwiseAbs().maxCoeff() : 0.0,
                      mult_scale});
  res.stationarity = d > 0 ? total.cwiseAbs().maxCoeff() / stat_scale : 0.0;
  res.complementarity /= stat_scale * (1.0 + (x.size() ? x.cwiseAbs().maxCoeff() : 0.0));
  return res;
}

}  // namespace dkt

#include "dkt/ik.hpp"

#include <chrono>
#include <limits>
#include <cmath>

#include "dkt/errors.hpp"
#include "dkt/manipulability.hpp"

namespace dkt {

namespace {

constexpr std::string_view kBaseNames[] = {"nr", "lm-wampler", "lm-chan", "lm-sugihara", "qp"};

bool is_lm(IkBase b) { return b == IkBase::lm_wampler || b == IkBase::lm_chan || b == IkBase::lm_sugihara; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string IkMethod::name() const {
  std::string s(kBaseNames[static_cast<int>(base)]);
  if (null == NullMode::sigma) s += "-null-sigma";
  if (null == NullMode::sigma_jm) s += "-null-sigma-jm";
  if (reject) s += "+";
  return s;
}

std::vector<std::string> IkMethod::valid_names() {
  std::vector<std::string> out;
  for (int b = 0; b < 4; ++b) {
    for (NullMode nm : {NullMode::none, NullMode::sigma, NullMode::sigma_jm}) {
      for (bool r : {false, true}) out.push_back(IkMethod{static_cast<IkBase>(b), r, nm}.name());
    }
  }
  out.push_back("qp");
  return out;
}

IkMethod IkMethod::parse(std::string_view s) {
  IkMethod m;
  std::string_view rest = s;
  auto take_plus = [&]() {
    if (ends_with(rest, "+")) {
      m.reject = true;
      rest.remove_suffix(1);
    }
  };
  take_plus();
  if (ends_with(rest, "-null-sigma-jm")) {
    m.null = NullMode::sigma_jm;
    rest.remove_suffix(14);
  } else if (ends_with(rest, "-null-sigma")) {
    m.null = NullMode::sigma;
    rest.remove_suffix(11);
  }
  if (!m.reject) take_plus();
  for (int b = 0; b < 5; ++b) {
    if (rest == kBaseNames[b]) {
      m.base = static_cast<IkBase>(b);
      if (m.base == IkBase::qp && (m.reject || m.null != NullMode::none)) break;
      return m;
    }
  }
  std::string valid;
  for (const auto& v : valid_names()) valid += (valid.empty() ? "" : ", ") + v;
  throw Error("unknown IK method '" + std::string(s) + "' (valid: " + valid + ")");
}

VecX nullspace_penalty_sigma(const RobotModel& model, const VecX& q) {
  const int n = model.n();
  if (q.size() != n) throw DimensionError("nullspace_penalty_sigma: q length mismatch");
  VecX s = VecX::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double tm = model.thresh_max()[i];
    const double tn = model.thresh_min()[i];
    if (q[i] >= tm) {
      const double r = (q[i] - tm) / (model.q_max()[i] - tm);
      s[i] = -r * r;
    } else if (q[i] <= tn) {
      const double r = (q[i] - tn) / (model.q_min()[i] - tn);
      s[i] = r * r;
    }
  }
  return s;
}

VecX lm_damping(IkBase base, const Vec6& e, int n, const IkParams& params) {
  const double energy = 0.5 * e.dot(params.we.cwiseProduct(e));
  switch (base) {
    case IkBase::lm_wampler: return VecX::Constant(n, params.wampler_lambda);
    case IkBase::lm_chan: return VecX::Constant(n, params.chan_lambda * energy);
    case IkBase::lm_sugihara: return VecX::Constant(n, energy + params.sugihara_wn);
    default: break;
  }
  return VecX::Zero(n);
}

VecX ik_step(const RobotModel& model, const VecX& q, const Vec6& e, const IkMethod& method, const IkParams& params) {
  const int n = model.n();
  const Mat6X j = jacobian(model, q);

  if (method.base == IkBase::qp) {
    ControllerConfig cfg;
    cfg.lambda_q = params.lambda_q;
    cfg.kappa = params.kappa;
    cfg.lambda = params.lambda_m;
    cfg.axes = Axes::all;
    cfg.velocity_limits = false;
    cfg.dampers = true;
    cfg.damper = params.damper;
    cfg.slack_bound = e.norm();
    const QpVelocity v = qp_slack_controller(model, q, e, cfg, e.norm());
    if (v.status != QpStatus::optimal) throw Error("QP step " + std::string(status_name(v.status)));
    return v.qd;
  }

  VecX qnull = VecX::Zero(n);
  if (method.null != NullMode::none) {
    if (n <= 6) throw NotRedundant("null-space methods need more than 6 joints, model has " + std::to_string(n));
    VecX task = nullspace_penalty_sigma(model, q) / params.lambda_sigma;
    if (method.null == NullMode::sigma_jm) {
      try {
        task += manipulability_jacobian(j, hessian_fast(j), Axes::all) / params.lambda_m;
      } catch (const SingularGram&) {
      }
    }
    qnull = nullspace_projector(j) * task;
  }

  if (method.base == IkBase::nr) return pinv(j) * e + qnull;

  const MatX jtw = j.transpose() * params.we.asDiagonal();
  MatX a = jtw * j;
  a.diagonal() += lm_damping(method.base, e, n, params);
  Eigen::LDLT<MatX> ldlt(a);
  const VecX dq = ldlt.solve(jtw * e);
  if (ldlt.info() != Eigen::Success || !dq.allFinite()) throw LinearSolveFailure("LM system is singular");
  // Added after the solve: A^-1 would scale null-space motion by 1 / W_n.
  return dq + qnull;
}

namespace {

void wrap_revolute(const RobotModel& model, VecX& q) {
  constexpr double two_pi = 2.0 * M_PI;
  for (int i = 0; i < model.n(); ++i) {
    if (model.ets().is_prismatic(i)) continue;
    const double lo = std::ceil((model.q_min()[i] - q[i]) / two_pi);
    const double hi = std::floor((model.q_max()[i] - q[i]) / two_pi);
    if (lo <= hi) {
      const double k = lo > 0.0 ? lo : (hi < 0.0 ? hi : 0.0);
      q[i] += k * two_pi;
    } else {
      q[i] -= two_pi * std::ceil((q[i] - M_PI) / two_pi);
    }
  }
}

}  // namespace

IkResult ik_solve(const RobotModel& model, const Mat4& td, const VecX& q0, const IkMethod& method,
                  const IkParams& params) {
  if (q0.size() != model.n()) throw DimensionError("ik: q0 length mismatch");
  if (method.null != NullMode::none && model.n() <= 6) {
    throw NotRedundant("null-space methods need more than 6 joints, model has " + std::to_string(model.n()));
  }
  const auto start = std::chrono::steady_clock::now();
  IkResult r;
  VecX q = q0;
  Vec6 e = angle_axis_error(fkine(model.ets(), q), td);
  bool converged = e.norm() < params.tol;
  while (!converged && r.iterations < params.step_limit) {
    try {
      q += ik_step(model, q, e, method, params);
    } catch (const Error&) {
      ++r.iterations;
      break;
    }
    ++r.iterations;
    if (!q.allFinite()) break;
    e = angle_axis_error(fkine(model.ets(), q), td);
    converged = e.norm() < params.tol;
  }
  if (converged) wrap_revolute(model, q);
  r.q = q;
  r.searches = 1;
  r.residual = q.allFinite() ? angle_axis_error(fkine(model.ets(), q), td).norm()
                             : std::numeric_limits<double>::infinity();
  r.success = converged && r.residual < params.tol;
  r.limit_violations = q.allFinite() ? model.limit_violations(q) : model.n();
  if (method.reject && r.limit_violations > 0) r.success = false;
  r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

IkResult ik_nr(const RobotModel& model, const Mat4& td, const VecX& q0, const IkParams& params) {
  return ik_solve(model, td, q0, IkMethod{IkBase::nr, false, NullMode::none}, params);
}

IkResult ik_lm(const RobotModel& model, const Mat4& td, const VecX& q0, IkBase damping, const IkParams& params) {
  if (!is_lm(damping)) throw Error("ik_lm: damping must be one of the LM variants");
  return ik_solve(model, td, q0, IkMethod{damping, false, NullMode::none}, params);
}

IkResult ik_with_nullspace(const RobotModel& model, const Mat4& td, const VecX& q0, IkBase base, bool use_jm,
                           const IkParams& params) {
  if (base == IkBase::qp) throw Error("ik_with_nullspace: base must be NR or LM");
  return ik_solve(model, td, q0, IkMethod{base, false, use_jm ? NullMode::sigma_jm : NullMode::sigma}, params);
}

IkResult ik_qp(const RobotModel& model, const Mat4& td, const VecX& q0, const IkParams& params) {
  return ik_solve(model, td, q0, IkMethod{IkBase::qp, false, NullMode::none}, params);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

VecX random_q(const RobotModel& model, std::mt19937_64& rng) {
  VecX q(model.n());
  for (int i = 0; i < model.n(); ++i) {
    q[i] = model.q_min()[i] + uniform01(rng) * (model.q_max()[i] - model.q_min()[i]);
  }
  return q;
}

IkResult global_search(const RobotModel& model, const Mat4& td, const IkMethod& method, const IkParams& params,
                       std::mt19937_64& rng) {
  IkResult total;
  for (int s = 1; s <= params.search_limit; ++s) {
    const VecX q0 = random_q(model, rng);
    const IkResult r = ik_solve(model, td, q0, method, params);
    total.iterations += r.iterations;
    total.wall_ns += r.wall_ns;
    total.searches = s;
    total.q = r.q;
    total.residual = r.residual;
    total.limit_violations = r.limit_violations;
    if (r.success) {
      total.success = true;
      break;
    }
  }
  return total;
}

}  // namespace dkt

// One line per criterion: PASS/FAIL, number, title, measured values, wall time.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "dkt/benchmark.hpp"
#include "dkt/errors.hpp"
#include "dkt/qrmc.hpp"
#include "dkt/report_io.hpp"
#include "dkt/servo.hpp"
#include "qp_oracle.hpp"
#include "support.hpp"

using namespace dkt;
using namespace dkt::test;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// qp-slack runs from every criterion feed the damper audit.
std::vector<std::pair<RobotModel, ServoTrace>> g_slack_runs;

ServoTrace run_slack(const RobotModel& m, const VecX& q0, const Mat4& td) {
  ControllerConfig cfg;
  cfg.variant = Controller::qp_slack;
  ServoTrace t = servo_simulate(m, q0, td, cfg);
  g_slack_runs.emplace_back(m, t);
  return t;
}

Outcome derivative_chain() {
  double ej = 0, en = 0, ef = 0, e3 = 0;
  std::mt19937_64 rng(1001);
  for (const auto& m : library_models()) {
    for (int k = 0; k < 50; ++k) {
      const VecX q = sample_q(m, rng);
      ej = std::max(ej, (jacobian(m, q) - fd_jacobian(m.ets(), q)).cwiseAbs().maxCoeff());
      const Hessian naive = hessian_naive(m.ets(), q);
      en = std::max(en, max_abs_diff(naive, fd_hessian(m.ets(), q)));
      ef = std::max(ef, max_abs_diff(hessian_fast(m.ets(), q), naive));
      const KinDerivative d3 = kin_derivative(m.ets(), q, 3);
      for (int l = 0; l < m.n(); ++l) {
        VecX qp = q, qm = q;
        qp[l] += 1e-6;
        qm[l] -= 1e-6;
        const Hessian hp = hessian(m.ets(), qp), hm = hessian(m.ets(), qm);
        for (int i = 0; i < m.n(); ++i) e3 = std::max(e3, (d3.at({l, i}) - (hp[i] - hm[i]) / 2e-6).cwiseAbs().maxCoeff());
      }
    }
  }
  return {ej <= 1e-7 && en <= 1e-6 && ef <= 1e-10 && e3 <= 1e-5,
          "J-FD " + fmt("%.1e", ej) + ", naive-FD " + fmt("%.1e", en) + ", fast-naive " + fmt("%.1e", ef) +
              ", order3-FD " + fmt("%.1e", e3)};
}

Outcome hessian_structure() {
  std::mt19937_64 rng(1002);
  int configs = 0, bad = 0;
  auto models = library_models();
  models.push_back(revolute_chain(12));
  for (const auto& m : models) {
    for (int k = 0; k < 50; ++k, ++configs) {
      const Hessian h = hessian_fast(m.ets(), sample_q(m, rng));
      bool ok = true;
      for (int i = 0; i < m.n(); ++i) {
        for (int c = 0; c < m.n(); ++c) {
          if (i >= c && h[i].block<3, 1>(3, c) != Vec3::Zero()) ok = false;
          if (h[i].block<3, 1>(0, c) != h[c].block<3, 1>(0, i)) ok = false;
        }
      }
      bad += !ok;
    }
  }
  return {bad == 0, std::to_string(configs - bad) + "/" + std::to_string(configs) + " configurations exact"};
}

double time_per_call(const std::function<void()>& f) {
  using clock = std::chrono::steady_clock;
  // Repeat until at least 20 ms elapse, keep the best of five batches.
  int reps = 1;
  for (;;) {
    const auto t0 = clock::now();
    for (int r = 0; r < reps; ++r) f();
    if (clock::now() - t0 > std::chrono::milliseconds(20)) break;
    reps *= 2;
  }
  double best = 1e300;
  for (int b = 0; b < 5; ++b) {
    const auto t0 = clock::now();
    for (int r = 0; r < reps; ++r) f();
    best = std::min(best, std::chrono::duration<double>(clock::now() - t0).count() / reps);
  }
  return best;
}

Outcome complexity() {
  std::vector<double> ratios;
  std::string detail;
  for (int n : {8, 16, 32, 64}) {
    const RobotModel m = revolute_chain(n);
    std::mt19937_64 rng(n);
    const VecX q = sample_q(m, rng);
    volatile double sink = 0;
    const double tn = time_per_call([&] { sink = sink + hessian_naive(m.ets(), q)[0](0, 0); });
    const double tf = time_per_call([&] { sink = sink + hessian_fast(m.ets(), q)[0](0, 0); });
    ratios.push_back(tn / tf);
    detail += (detail.empty() ? "naive/fast " : ", ") + std::string("n=") + std::to_string(n) + ": " +
              fmt("%.1f", tn / tf);
  }
  bool mono = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) mono = mono && ratios[i] > ratios[i - 1];
  return {mono && ratios.back() > 4.0, detail};
}

Outcome manipulability_gradient() {
  const RobotModel m = builtin_model("panda");
  std::mt19937_64 rng(1004);
  double worst = 0;
  int used = 0;
  while (used < 100) {
    const VecX q = sample_q(m, rng);
    if (manipulability(m.ets(), q) <= 1e-3) continue;
    ++used;
    const VecX fd = fd_gradient([&](const VecX& x) { return manipulability(m.ets(), x); }, q);
    worst = std::max(worst, (manipulability_jacobian(m.ets(), q) - fd).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, "max |J_m - FD| " + fmt("%.1e", worst) + " over 100 configurations"};
}

Outcome analytic_form() {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  double rate = 0;
  for (int k = 0; k < 100; ++k) {
    const Vec3 g(u(rng), u(rng), u(rng)), gd(u(rng), u(rng), u(rng));
    const double h = 1e-6;
    const Mat3 rdot = (rpy_to_rot(g + h * gd) - rpy_to_rot(g - h * gd)) / (2 * h);
    rate = std::max(rate, (rpy_rate_matrix(g) * gd - vex(rdot * rpy_to_rot(g).transpose())).norm());
  }

  const RobotModel m = builtin_model("panda");
  std::normal_distribution<double> nd;
  double dot = 0;
  for (int tested = 0; tested < 30;) {
    const VecX q = sample_q(m, rng);
    if (std::abs(std::cos(rot_to_rpy(rot_part(fkine(m.ets(), q)))[1])) < 0.1) continue;
    ++tested;
    VecX qd(7);
    for (int i = 0; i < 7; ++i) qd[i] = nd(rng);
    const double h = 1e-6;
    const Mat6X fd = (analytic_jacobian(m.ets(), q + h * qd) - analytic_jacobian(m.ets(), q - h * qd)) / (2 * h);
    dot = std::max(dot, (analytic_jacobian_dot(m.ets(), q, qd) - fd).cwiseAbs().maxCoeff());
  }

  auto throws = [](double beta) {
    try {
      rpy_rate_inverse(Vec3(0.3, beta, -0.2));
    } catch (const RpySingularity&) {
      return true;
    }
    return false;
  };
  const double half_pi = kPi / 2;
  const bool sing = throws(half_pi) && throws(half_pi - 0.9e-8) && throws(-half_pi + 0.9e-8) &&
                    !throws(half_pi - 1.1e-8) && !throws(half_pi - 1e-6);
  return {rate <= 1e-7 && dot <= 1e-5 && sing,
          "A*rate " + fmt("%.1e", rate) + ", Ja_dot-FD " + fmt("%.1e", dot) + ", singularity guard " +
              (sing ? "ok" : "wrong")};
}

Outcome qp_solver() {
  std::mt19937_64 rng(1006);
  double kkt = 0, diff = 0;
  int solved = 0, mismatched = 0;
  for (int k = 0; k < 500; ++k) {
    const QpProblem p = random_tiny_qp(rng);
    const auto ref = qp_enumerate(p);
    const QpSolution s = solve(p);
    if (!ref) {
      mismatched += s.status != QpStatus::infeasible;
      continue;
    }
    if (s.status != QpStatus::optimal) {
      ++mismatched;
      continue;
    }
    ++solved;
    diff = std::max(diff, (s.x - *ref).cwiseAbs().maxCoeff());
    kkt = std::max(kkt, check_kkt(p, s.x).max());
  }
  // Controller QPs along servo runs.
  const RobotModel m = builtin_model("panda");
  int ctrl = 0;
  for (int r = 0; r < 5; ++r) {
    VecX q0 = sample_q(m, rng);
    q0[r] = m.q_min()[r] + 0.1;
    const ServoTrace t = run_slack(m, q0, fkine(m.ets(), sample_q(m, rng)));
    ControllerConfig cfg;
    cfg.variant = Controller::qp_slack;
    const Mat4 td = fkine(m.ets(), t.records.back().q);
    for (std::size_t i = 0; i + 1 < t.records.size(); i += 10) {
      const auto& rec = t.records[i];
      const Vec6 e = angle_axis_error(fkine(m.ets(), rec.q), td);
      const QpVelocity v = qp_slack_controller(m, rec.q, e, cfg, e.norm());
      if (v.status != QpStatus::optimal) continue;
      kkt = std::max(kkt, v.kkt.max());
      ++ctrl;
      ControllerConfig pc;
      pc.variant = Controller::qp_park;
      const QpVelocity w = qp_park(m, rec.q, e, pc);
      if (w.status == QpStatus::optimal) {
        kkt = std::max(kkt, w.kkt.max());
        ++ctrl;
      }
    }
  }
  return {mismatched == 0 && diff <= 1e-7 && kkt < 1e-8,
          "enumeration diff " + fmt("%.1e", diff) + " (" + std::to_string(solved) + " solved, " +
              std::to_string(mismatched) + " status mismatches), max KKT " + fmt("%.1e", kkt) + " incl. " +
              std::to_string(ctrl) + " controller QPs"};
}

Outcome qp_rrmc_min_norm() {
  const RobotModel m = builtin_model("panda");
  std::mt19937_64 rng(1007);
  std::normal_distribution<double> nd(0.0, 0.3);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const VecX q = sample_q(m, rng);
    Vec6 nu;
    for (int i = 0; i < 6; ++i) nu[i] = nd(rng);
    const QpVelocity v = qp_rrmc(m, q, nu, VecX(), VecX());
    if (v.status != QpStatus::optimal) return {false, "QP not optimal on case " + std::to_string(k)};
    worst = std::max(worst, (v.qd - pinv(jacobian(m, q)) * nu).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, "max |qd - J^+ nu| " + fmt("%.1e", worst)};
}

Outcome park_vs_rrmc() {
  const RobotModel m = builtin_model("panda");
  int better = 0;
  double fidelity = 0;
  for (int k = 0; k < 100; ++k) {
    auto rng = problem_rng(7, k, 0);
    const VecX q0 = random_q(m, rng), qt = random_q(m, rng);
    const Mat4 td = fkine(m.ets(), qt);
    ControllerConfig rr, pk;
    pk.variant = Controller::park;
    ServoOptions o;
    o.max_t = 20;
    const ServoTrace a = servo_simulate(m, q0, td, rr, o), b = servo_simulate(m, q0, td, pk, o);
    if (b.final_record().m_rot >= a.final_record().m_rot) ++better;
    for (const auto& r : b.records) fidelity = std::max(fidelity, r.task_residual);
  }
  return {better >= 80 && fidelity < 1e-8,
          "park >= rrmc final m_rot in " + std::to_string(better) + "/100, max |J qd - nu| " + fmt("%.1e", fidelity)};
}

Outcome damper_safety() {
  // Dedicated runs that start next to a limit, on every library model.
  for (const auto& m : library_models()) {
    for (int k = 0; k < 30; ++k) {
      auto rng = problem_rng(9, k, 0);
      VecX q0 = random_q(m, rng);
      q0 = q0.cwiseMax(m.q_min() + VecX::Constant(m.n(), 0.06)).cwiseMin(m.q_max() - VecX::Constant(m.n(), 0.06));
      const int j = k % m.n();
      q0[j] = k % 2 ? m.q_max()[j] - 0.08 : m.q_min()[j] + 0.08;
      run_slack(m, q0, fkine(m.ets(), random_q(m, rng)));
    }
  }
  const DamperConfig d;
  const double slop = ServoOptions{}.dt * d.eta;
  double worst = 1e300;
  int entered = 0, ticks = 0, active = 0, failed = 0;
  for (const auto& [m, t] : g_slack_runs) {
    failed += t.status == ServoStatus::failed;
    for (const auto& r : t.records) {
      ++ticks;
      active += r.dampers > 0;
      const double dist = std::min((r.q - m.q_min()).minCoeff(), (m.q_max() - r.q).minCoeff());
      worst = std::min(worst, dist);
      entered += dist < d.rho_s - slop;
    }
  }
  return {entered == 0 && failed == 0 && active > 0,
          std::to_string(g_slack_runs.size()) + " qp-slack runs, " + std::to_string(ticks) + " ticks (" +
              std::to_string(active) + " with dampers), closest approach " + fmt("%.4f", worst) + " rad vs rho_s " +
              fmt("%.2f", d.rho_s)};
}

Outcome ik_benchmark() {
  BenchmarkOptions o;
  o.problems = 1000;
  o.seed = 42;
  auto parse = [](std::initializer_list<const char*> names) {
    std::vector<IkMethod> v;
    for (const char* n : names) v.push_back(IkMethod::parse(n));
    return v;
  };
  std::vector<std::string> failures;
  std::string detail;

  const auto ur5 = run_benchmark(builtin_model("ur5"), parse({"nr", "lm-chan"}), o);
  const auto& nr = ur5.rows[0];
  const auto& chan = ur5.rows[1];
  if (nr.infeasible || chan.infeasible) failures.push_back("ur5 infeasible");
  if (chan.median_iterations < 4 || chan.median_iterations > 16) failures.push_back("ur5 lm-chan median");
  if (!(nr.mean_iterations > chan.mean_iterations)) failures.push_back("ur5 mean ordering");
  detail += "ur5 nr " + fmt("%.2f", nr.mean_iterations) + "/" + fmt("%g", nr.median_iterations) + " lm-chan " +
            fmt("%.2f", chan.mean_iterations) + "/" + fmt("%g", chan.median_iterations) + " (mean/median), infeasible " +
            std::to_string(nr.infeasible) + "," + std::to_string(chan.infeasible);

  const auto panda = run_benchmark(
      builtin_model("panda"),
      parse({"nr", "lm-chan", "nr+", "lm-wampler+", "lm-chan+", "lm-sugihara+", "nr-null-sigma+",
             "nr-null-sigma-jm+", "lm-chan-null-sigma+", "lm-chan-null-sigma-jm+", "qp"}),
      o);
  int zero_rows = 0;
  for (std::size_t i = 0; i < panda.rows.size(); ++i) {
    const auto& r = panda.rows[i];
    if (i < 2) {
      if (!(r.violations > 0.3 * o.problems)) failures.push_back("panda " + r.method + " violations");
    } else if (r.violations != 0) {
      failures.push_back("panda " + r.method + " violations");
    } else {
      ++zero_rows;
    }
  }
  detail += "; panda violations nr " + std::to_string(panda.rows[0].violations) + ", lm-chan " +
            std::to_string(panda.rows[1].violations) + ", " + std::to_string(zero_rows) + "/" +
            std::to_string(panda.rows.size() - 2) + " constrained methods at 0";

  const auto narrow = run_benchmark(builtin_model("narrow7"),
                                    parse({"qp", "lm-wampler+", "lm-chan+", "lm-sugihara+"}), o);
  detail += "; narrow7 infeasible qp " + std::to_string(narrow.rows[0].infeasible);
  for (std::size_t i = 1; i < narrow.rows.size(); ++i) {
    detail += ", " + narrow.rows[i].method + " " + std::to_string(narrow.rows[i].infeasible);
    if (narrow.rows[0].infeasible > narrow.rows[i].infeasible) failures.push_back("narrow7 vs " + narrow.rows[i].method);
  }
  for (const auto& f : failures) detail += " [" + f + "]";
  return {failures.empty(), detail};
}

Outcome quadratic_rate() {
  // (a) first Newton iterate from zero equals the RRMC step
  double red = 0;
  std::mt19937_64 rng(1011);
  std::normal_distribution<double> nd(0.0, 0.01);
  for (const auto& m : library_models()) {
    for (int k = 0; k < 20; ++k) {
      const VecX q = sample_q(m, rng);
      if (rank(jacobian(m, q)) < 6) continue;
      Vec6 dx;
      for (int i = 0; i < 6; ++i) dx[i] = nd(rng);
      QrmcConfig cfg;
      cfg.seed = QrmcSeed::zero;
      cfg.inner_max = 1;
      red = std::max(red, (qrmc_solve(m.ets(), q, dx, cfg).dq - pinv(jacobian(m, q)) * dx).cwiseAbs().maxCoeff());
    }
  }
  // (b) Taylor remainder shrinks 8x per halving
  double worst_ratio_dev = 0;
  std::string ratios;
  for (const auto& m : library_models()) {
    const VecX q = sample_q(m, rng);
    VecX dir(m.n());
    for (int i = 0; i < m.n(); ++i) dir[i] = nd(rng);
    dir *= 0.05 / dir.norm();
    auto rem = [&](double s) {
      const VecX dq = s * dir;
      const Mat4 a = fkine(m.ets(), q), b = fkine(m.ets(), q + dq);
      Vec6 d;
      d.head<3>() = trans_part(b) - trans_part(a);
      d.tail<3>() = rotation_log(rot_part(b) * rot_part(a).transpose());
      return taylor_residual(m.ets(), q, dq, d).norm();
    };
    const double ratio = rem(1.0) / rem(0.5);
    worst_ratio_dev = std::max(worst_ratio_dev, std::abs(ratio / 8.0 - 1.0));
    ratios += (ratios.empty() ? "" : ",") + fmt("%.2f", ratio);
  }
  // (c) singular start on the straight planar chain
  const RobotModel chain = planar3r();
  const double a = 0.4;
  const Mat4 td = fkine(chain.ets(), (VecX(3) << a, -2 * a, a).finished());
  ControllerConfig cfg;
  ServoOptions opts;
  opts.qrmc.seed = QrmcSeed::constant;
  const ServoTrace qr = qrmc_servo(chain, VecX::Zero(3), td, cfg, opts);
  const ServoTrace rr = servo_simulate(chain, VecX::Zero(3), td, cfg, opts);
  const bool escape = qr.status == ServoStatus::arrived && rr.status == ServoStatus::local_minimum;
  return {red <= 1e-9 && worst_ratio_dev <= 0.2 && escape,
          "reduction " + fmt("%.1e", red) + ", Taylor ratios " + ratios + ", singular start: qrmc " +
              std::string(status_name(qr.status)) + " in " + std::to_string(qr.ticks()) + " ticks, rrmc " +
              std::string(status_name(rr.status)) + " at err " + fmt("%.3f", rr.final_record().err)};
}

#ifdef DKT_CLI_PATH
std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

int sh(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }
#endif

Outcome determinism() {
#ifndef DKT_CLI_PATH
  return {false, "CLI not built"};
#else
  const std::string cli = DKT_CLI_PATH;
  const std::string dir = "acceptance_determinism";
  sh("mkdir -p " + dir);
  const std::string bench = " ik-bench --model ur5 --methods nr,lm-chan,lm-sugihara --problems 300 --seed 42 --out ";
  const std::string pbench = " ik-bench --model panda --methods lm-chan+,qp --problems 100 --seed 7 --format json --out ";
  std::vector<std::string> outs;
  bool ran = true;
  for (const char* threads : {"1", "4", "1", "4"}) {
    const std::string tag = std::to_string(outs.size());
    const std::string env = std::string("DKT_THREADS=") + threads + " ";
    ran = ran && sh(env + cli + bench + dir + "/ur5_" + tag + ".csv") == 0;
    ran = ran && sh(env + cli + pbench + dir + "/panda_" + tag + ".json") == 0;
    outs.push_back(tag);
  }
  const std::string servo = " servo --model panda --controller park --compare rrmc --seed 11 --out ";
  for (const char* s : {"a", "b"}) {
    sh(cli + servo + dir + "/servo_" + s + ".csv");
    sh(cli + " servo --model panda --controller qp-slack --seed 3 --format json --out " + dir + "/slack_" + s + ".json");
  }
  bool same = ran;
  for (const auto& t : outs) {
    same = same && slurp(dir + "/ur5_" + t + ".csv") == slurp(dir + "/ur5_0.csv");
    same = same && slurp(dir + "/panda_" + t + ".json") == slurp(dir + "/panda_0.json");
  }
  const std::string sa = slurp(dir + "/servo_a.csv");
  same = same && !sa.empty() && sa == slurp(dir + "/servo_b.csv");
  same = same && slurp(dir + "/servo_a.rrmc.csv") == slurp(dir + "/servo_b.rrmc.csv");
  same = same && !slurp(dir + "/slack_a.json").empty() && slurp(dir + "/slack_a.json") == slurp(dir + "/slack_b.json");
  const bool nonempty = slurp(dir + "/ur5_0.csv").size() > 100;
  return {same && nonempty, std::string(ran ? "" : "ik-bench exited nonzero; ") +
                                "ik-bench x4 (DKT_THREADS 1,4) and servo x2 outputs " +
                                (same ? "byte-identical" : "differ")};
#endif
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double limit_s;  // 0: no runtime bound
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "derivative oracle chain", 30, derivative_chain},
      {2, "fast Hessian structure", 0, hessian_structure},
      {3, "Hessian complexity ratio", 60, complexity},
      {4, "manipulability Jacobian", 10, manipulability_gradient},
      {5, "analytical Jacobian", 0, analytic_form},
      {6, "QP solver", 30, qp_solver},
      {7, "QP-RRMC minimum norm", 0, qp_rrmc_min_norm},
      {8, "Park controller", 120, park_vs_rrmc},
      {9, "damper safety", 0, damper_safety},
      {10, "IK benchmark", 600, ik_benchmark},
      {11, "quadratic-rate control", 30, quadratic_rate},
      {12, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += " [over " + fmt("%.0f", c.limit_s) + " s budget]";
    }
    failed += !o.pass;
    std::printf("%s  %2d  %-26s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}

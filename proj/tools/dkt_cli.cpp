#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dkt/benchmark.hpp"
#include "dkt/errors.hpp"
#include "dkt/kinematics.hpp"
#include "dkt/manipulability.hpp"
#include "dkt/report_io.hpp"
#include "dkt/servo.hpp"

namespace {

using namespace dkt;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNoConvergence = 3;

struct Common {
  std::string model = "panda";
  std::string q;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--model", c.model, "Builtin model name (panda, ur5, narrow7) or ETS file path")
      ->capture_default_str();
  app->add_option("--q", c.q, "Joint vector, comma-separated radians/metres");
  app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app->add_option("--out", c.out, "Output path (default stdout)");
  app->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> v;
  if (text.empty()) return v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string tok = text.substr(pos, end - pos);
    const auto first = tok.find_first_not_of(" \t");
    const auto last = tok.find_last_not_of(" \t");
    tok = first == std::string::npos ? "" : tok.substr(first, last - first + 1);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw Error(what + ": cannot parse '" + tok + "' as a number");
    }
    v.push_back(x);
    pos = end + 1;
  }
  return v;
}

VecX parse_vec(const std::string& text, int n, const std::string& what) {
  const auto v = parse_list(text, what);
  if (static_cast<int>(v.size()) != n) {
    throw DimensionError(what + ": expected " + std::to_string(n) + " values, got " + std::to_string(v.size()));
  }
  return Eigen::Map<const VecX>(v.data(), n);
}

VecX joint_vector(const Common& c, const RobotModel& m) {
  if (c.q.empty()) return VecX::Zero(m.n());
  return parse_vec(c.q, m.n(), "--q");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

std::string matrix_text(const Common& c, const MatX& m) {
  return c.format == "json" ? matrix_json(m) : matrix_csv(m);
}

// "trace.csv" + "rrmc" -> "trace.rrmc.csv"
std::string sibling_path(const std::string& path, const std::string& tag) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "." + tag;
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

int cmd_fk(const Common& c) {
  const RobotModel m = load_model(c.model);
  emit(c.out, matrix_text(c, fkine(m.ets(), joint_vector(c, m))));
  return kOk;
}

int cmd_jacobian(const Common& c) {
  const RobotModel m = load_model(c.model);
  emit(c.out, matrix_text(c, jacobian(m, joint_vector(c, m))));
  return kOk;
}

int cmd_hessian(const Common& c, const std::string& check) {
  const RobotModel m = load_model(c.model);
  const VecX q = joint_vector(c, m);
  const Hessian h = hessian(m, q);

  std::string text;
  if (c.format == "json") {
    nlohmann::ordered_json j;
    for (int i = 0; i < m.n(); ++i) j["H_" + std::to_string(i)] = nlohmann::json::parse(matrix_json(h[i]));
    text = j.dump() + "\n";
  } else {
    for (int i = 0; i < m.n(); ++i) text += "H_" + std::to_string(i) + "\n" + matrix_csv(h[i]);
  }
  emit(c.out, text);

  if (check == "fd") {
    const double step = 1e-6;
    double dev = 0.0;
    for (int i = 0; i < m.n(); ++i) {
      VecX qp = q, qm = q;
      qp[i] += step;
      qm[i] -= step;
      const Mat6X fd = (jacobian(m, qp) - jacobian(m, qm)) / (2.0 * step);
      dev = std::max(dev, (fd - h[i]).cwiseAbs().maxCoeff());
    }
    std::printf("max FD deviation: %.3e\n", dev);
    if (!(dev < 1e-6)) return kNoConvergence;
  }
  return kOk;
}

int cmd_manip(const Common& c, const std::string& axes_text) {
  const RobotModel m = load_model(c.model);
  const VecX q = joint_vector(c, m);
  const Axes axes = parse_axes(axes_text);
  const Mat6X j = jacobian(m, q);
  const double mv = manipulability(j, axes);
  VecX jm;
  std::string note;
  try {
    jm = manipulability_jacobian(j, hessian_fast(j), axes);
  } catch (const SingularGram& e) {
    note = e.what();
  }

  std::string text;
  if (c.format == "json") {
    nlohmann::ordered_json out;
    out["axes"] = std::string(axes_name(axes));
    out["m"] = std::stod(format_number(mv));
    if (jm.size()) {
      out["J_m"] = nlohmann::json::parse(matrix_json(jm.transpose()))[0];
    } else {
      out["J_m"] = nullptr;
    }
    text = out.dump() + "\n";
  } else {
    text = "m," + format_number(mv) + "\n";
    if (jm.size()) text += "J_m," + matrix_csv(jm.transpose());
  }
  emit(c.out, text);
  if (!note.empty()) std::cerr << "dkt: J_m undefined: " << note << "\n";
  return kOk;
}

struct ServoArgs {
  std::string controller = "rrmc";
  std::string compare;
  std::string target_q;
  std::string target_offset;
  bool target_current = false;
  double dt = 0.02;
  double max_t = 10.0;
  double gain = 1.0;
  double lambda = 1.0;
  std::string axes = "rotational";
  std::string qrmc_seed = "pinv";
};

ControllerConfig controller_config(const std::string& name, const ServoArgs& a) {
  ControllerConfig cfg;
  cfg.variant = parse_controller(name);
  cfg.k = a.gain;
  cfg.lambda = a.lambda;
  cfg.axes = parse_axes(a.axes);
  return cfg;
}

int cmd_servo(const Common& c, const ServoArgs& a) {
  const RobotModel m = load_model(c.model);
  VecX q0;
  if (c.q.empty()) {
    auto rng = problem_rng(c.seed, 0, 0);
    q0 = random_q(m, rng);
  } else {
    q0 = parse_vec(c.q, m.n(), "--q");
  }

  Mat4 td;
  if (a.target_current) {
    td = fkine(m.ets(), q0);
  } else if (!a.target_q.empty()) {
    td = fkine(m.ets(), parse_vec(a.target_q, m.n(), "--target-q"));
  } else if (!a.target_offset.empty()) {
    td = fkine(m.ets(), q0);
    td.block<3, 1>(0, 3) += Vec3(parse_vec(a.target_offset, 3, "--target-offset"));
  } else {
    auto rng = problem_rng(c.seed, 0, 1);
    td = fkine(m.ets(), random_q(m, rng));
  }

  ServoOptions opts;
  opts.dt = a.dt;
  opts.max_t = a.max_t;
  opts.qrmc.seed = parse_seed(a.qrmc_seed);

  auto run = [&](const std::string& name) {
    return servo_simulate(m, q0, td, controller_config(name, a), opts);
  };
  auto text = [&](const ServoTrace& t) { return c.format == "json" ? trace_json(t) : trace_csv(t); };

  const ServoTrace primary = run(a.controller);
  std::ostream& info = c.out.empty() ? std::cerr : std::cout;
  if (a.compare.empty()) {
    emit(c.out, text(primary));
  } else {
    const ServoTrace other = run(a.compare);
    if (c.out.empty()) {
      std::cout << text(primary) << "\n" << text(other);
    } else {
      emit(c.out, text(primary));
      emit(sibling_path(c.out, other.controller), text(other));
    }
    info << "final m_rot: " << primary.controller << "=" << format_number(primary.final_record().m_rot) << " "
         << other.controller << "=" << format_number(other.final_record().m_rot) << "\n";
  }
  info << primary.controller << ": " << status_name(primary.status) << " after " << primary.ticks()
       << " ticks, final error " << format_number(primary.final_record().err);
  if (!primary.message.empty()) info << " (" << primary.message << ")";
  info << "\n";
  return primary.status == ServoStatus::arrived ? kOk : kNoConvergence;
}

struct BenchArgs {
  std::string methods = "nr,lm-chan";
  int problems = 1000;
  bool timing = false;
};

int cmd_ik_bench(const Common& c, const BenchArgs& a) {
  const RobotModel m = load_model(c.model);
  std::vector<IkMethod> methods;
  std::stringstream ss(a.methods);
  for (std::string name; std::getline(ss, name, ',');) {
    if (!name.empty()) methods.push_back(IkMethod::parse(name));
  }
  if (methods.empty()) throw Error("--methods is empty");
  if (a.problems <= 0) throw Error("--problems must be positive");

  BenchmarkOptions opts;
  opts.problems = a.problems;
  opts.seed = c.seed;
  opts.timing = a.timing;
  const BenchmarkReport r = run_benchmark(m, methods, opts);
  emit(c.out, c.format == "json" ? benchmark_json(r) : benchmark_csv(r));
  return kOk;
}

int cmd_model_check(const Common& c) {
  const RobotModel m = load_model(c.model);
  const RobotModel again = parse_ets(serialize_ets(m));
  if (serialize_ets(again) != serialize_ets(m)) throw ModelError("serialization does not round-trip");
  std::ostringstream out;
  out << "model " << m.name() << ": " << m.n() << " joints, " << m.ets().size() << " transforms\n";
  for (int i = 0; i < m.n(); ++i) {
    out << "  q" << i << " " << axis_name(m.ets().joint_axis(i)) << " [" << format_number(m.q_min()[i]) << ", "
        << format_number(m.q_max()[i]) << "] vmax " << format_number(m.qd_max()[i]) << "\n";
  }
  emit(c.out, out.str());
  return kOk;
}

int cmd_model_dump(const Common& c) {
  emit(c.out, serialize_ets(load_model(c.model)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential kinematics toolkit"};
  app.require_subcommand(1);

  Common fk_c, jac_c, hes_c, man_c, srv_c, bench_c, chk_c, dump_c;
  std::string check, axes = "all";
  ServoArgs servo;
  BenchArgs bench;

  auto* fk = app.add_subcommand("fk", "End-effector pose (4x4)");
  add_common(fk, fk_c);
  auto* jac = app.add_subcommand("jacobian", "World-frame geometric Jacobian (6xn)");
  add_common(jac, jac_c);
  auto* hes = app.add_subcommand("hessian", "Kinematic Hessian as n slices H_0..H_{n-1}");
  add_common(hes, hes_c);
  hes->add_option("--check", check, "Verify against finite differences of the Jacobian")
      ->check(CLI::IsMember({"fd"}));
  auto* man = app.add_subcommand("manip", "Manipulability and its gradient");
  add_common(man, man_c);
  man->add_option("--axes", axes, "all, translational or rotational")->capture_default_str();

  auto* srv = app.add_subcommand("servo", "Closed-loop position-based servo simulation");
  add_common(srv, srv_c);
  srv->add_option("--controller", servo.controller, "rrmc, park, qp, qp-slack, qrmc (also qp-rrmc)")
      ->capture_default_str();
  srv->add_option("--compare", servo.compare, "Second controller run from the same start and target");
  srv->add_option("--target-q", servo.target_q, "Target pose as fkine of this joint vector");
  srv->add_option("--target-offset", servo.target_offset, "Target = start pose translated by dx,dy,dz");
  srv->add_flag("--target-current", servo.target_current, "Target = start pose");
  srv->add_option("--dt", servo.dt, "Integration step (s)")->capture_default_str()->check(CLI::PositiveNumber);
  srv->add_option("--max-t", servo.max_t, "Timeout (s)")->capture_default_str()->check(CLI::PositiveNumber);
  srv->add_option("--gain", servo.gain, "Servoing gain k (1/s)")->capture_default_str();
  srv->add_option("--lambda", servo.lambda, "Null-space / manipulability gain divisor")->capture_default_str();
  srv->add_option("--axes", servo.axes, "Manipulability axes for park/qp/qp-slack")->capture_default_str();
  srv->add_option("--qrmc-seed", servo.qrmc_seed, "zero, constant or pinv")->capture_default_str();

  auto* bch = app.add_subcommand("ik-bench", "Inverse kinematics benchmark table");
  add_common(bch, bench_c);
  bch->add_option("--methods", bench.methods, "Comma-separated method names")->capture_default_str();
  bch->add_option("--problems", bench.problems, "Number of target poses")->capture_default_str();
  bch->add_flag("--timing", bench.timing, "Fill the time columns (not reproducible)");

  auto* model = app.add_subcommand("model", "Model file utilities");
  model->require_subcommand(1);
  auto* chk = model->add_subcommand("check", "Validate a model and print its joints");
  add_common(chk, chk_c);
  auto* dump = model->add_subcommand("dump", "Print the canonical ETS text");
  add_common(dump, dump_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*fk) return cmd_fk(fk_c);
    if (*jac) return cmd_jacobian(jac_c);
    if (*hes) return cmd_hessian(hes_c, check);
    if (*man) return cmd_manip(man_c, axes);
    if (*srv) return cmd_servo(srv_c, servo);
    if (*bch) return cmd_ik_bench(bench_c, bench);
    if (*chk) return cmd_model_check(chk_c);
    if (*dump) return cmd_model_dump(dump_c);
  } catch (const std::exception& e) {
    std::cerr << "dkt: error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

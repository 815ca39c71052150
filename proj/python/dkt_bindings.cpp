#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dkt/benchmark.hpp"
#include "dkt/errors.hpp"
#include "dkt/kinematics.hpp"
#include "dkt/manipulability.hpp"
#include "dkt/qrmc.hpp"
#include "dkt/report_io.hpp"
#include "dkt/servo.hpp"

namespace py = pybind11;
using namespace dkt;

namespace {

// n x 6 x n array, slice i = dJ/dq_i.
py::array_t<double> hessian_array(const Hessian& h) {
  const py::ssize_t n = static_cast<py::ssize_t>(h.size());
  py::array_t<double> out({n, py::ssize_t{6}, n});
  auto a = out.mutable_unchecked<3>();
  for (py::ssize_t i = 0; i < n; ++i)
    for (py::ssize_t r = 0; r < 6; ++r)
      for (py::ssize_t c = 0; c < n; ++c) a(i, r, c) = h[i](r, c);
  return out;
}

py::dict trace_dict(const ServoTrace& t) {
  const auto k = static_cast<Eigen::Index>(t.records.size());
  MatX q(k, t.n), qd(k, t.n), delta(k, 6);
  VecX time(k), err(k), m_rot(k), m_trans(k), lam(k);
  std::vector<int> dampers(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const auto& rec = t.records[r];
    time[r] = rec.t;
    q.row(r) = rec.q.transpose();
    qd.row(r) = rec.qd.transpose();
    delta.row(r) = rec.delta.transpose();
    err[r] = rec.err;
    m_rot[r] = rec.m_rot;
    m_trans[r] = rec.m_trans;
    lam[r] = rec.lambda_delta;
    dampers[r] = rec.dampers;
  }
  py::dict d;
  d["controller"] = t.controller;
  d["status"] = std::string(status_name(t.status));
  d["message"] = t.message;
  d["dt"] = t.dt;
  d["t"] = time;
  d["q"] = q;
  d["qd"] = qd;
  d["err"] = err;
  d["m_rot"] = m_rot;
  d["m_trans"] = m_trans;
  d["delta"] = delta;
  d["lambda_delta"] = lam;
  d["dampers"] = dampers;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dkt, m) {
  m.doc() = "Differential kinematics toolkit";

  static py::exception<Error> base(m, "DktError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<SingularGram>(m, "SingularGram", base.ptr());
  py::register_exception<RpySingularity>(m, "RpySingularity", base.ptr());
  py::register_exception<NotRedundant>(m, "NotRedundant", base.ptr());

  py::class_<RobotModel>(m, "RobotModel")
      .def_property_readonly("name", &RobotModel::name)
      .def_property_readonly("n", &RobotModel::n)
      .def_property_readonly("q_min", &RobotModel::q_min)
      .def_property_readonly("q_max", &RobotModel::q_max)
      .def_property_readonly("qd_max", &RobotModel::qd_max)
      .def("within_limits", &RobotModel::within_limits)
      .def("__repr__", [](const RobotModel& r) { return "<RobotModel " + r.name() + " n=" + std::to_string(r.n()) + ">"; });

  m.def("builtin_model_names", &builtin_model_names);
  m.def("load_model", &load_model, py::arg("name_or_path"));
  m.def("parse_ets", [](const std::string& text) { return parse_ets(text); }, py::arg("text"));
  m.def("serialize_ets", &serialize_ets);

  m.def("fkine", [](const RobotModel& r, const VecX& q) { return Mat4(fkine(r.ets(), q)); });
  m.def("jacobian", [](const RobotModel& r, const VecX& q) { return MatX(jacobian(r, q)); });
  m.def("hessian", [](const RobotModel& r, const VecX& q) { return hessian_array(hessian_fast(r.ets(), q)); });
  m.def("hessian_naive", [](const RobotModel& r, const VecX& q) { return hessian_array(hessian_naive(r.ets(), q)); });
  m.def(
      "manipulability",
      [](const RobotModel& r, const VecX& q, const std::string& axes) {
        return manipulability(r.ets(), q, parse_axes(axes));
      },
      py::arg("model"), py::arg("q"), py::arg("axes") = "all");
  m.def(
      "manipulability_jacobian",
      [](const RobotModel& r, const VecX& q, const std::string& axes) {
        return manipulability_jacobian(r.ets(), q, parse_axes(axes));
      },
      py::arg("model"), py::arg("q"), py::arg("axes") = "all");
  m.def("analytic_jacobian", [](const RobotModel& r, const VecX& q) { return MatX(analytic_jacobian(r.ets(), q)); });
  m.def("angle_axis_error", [](const Mat4& te, const Mat4& td) { return VecX(angle_axis_error(te, td)); });

  m.def(
      "qrmc_step",
      [](const RobotModel& r, const VecX& q, const Vec6& dx, const std::string& seed) {
        QrmcConfig cfg;
        cfg.seed = parse_seed(seed);
        const QrmcStep s = qrmc_solve(r.ets(), q, dx, cfg);
        return py::make_tuple(s.dq, s.converged, s.residual, s.iterations);
      },
      py::arg("model"), py::arg("q"), py::arg("dx"), py::arg("seed") = "pinv");

  m.def(
      "servo",
      [](const RobotModel& r, const VecX& q0, const Mat4& td, const std::string& controller, double dt, double max_t) {
        ControllerConfig cfg;
        cfg.variant = parse_controller(controller);
        ServoOptions opts;
        opts.dt = dt;
        opts.max_t = max_t;
        return trace_dict(servo_simulate(r, q0, td, cfg, opts));
      },
      py::arg("model"), py::arg("q0"), py::arg("target"), py::arg("controller") = "rrmc", py::arg("dt") = 0.02,
      py::arg("max_t") = 10.0);

  m.def(
      "ik",
      [](const RobotModel& r, const Mat4& td, const std::string& method, std::uint64_t seed) {
        auto rng = problem_rng(seed, 0, 1);
        const IkResult res = global_search(r, td, IkMethod::parse(method), IkParams{}, rng);
        py::dict d;
        d["q"] = res.q;
        d["success"] = res.success;
        d["iterations"] = res.iterations;
        d["searches"] = res.searches;
        d["residual"] = res.residual;
        return d;
      },
      py::arg("model"), py::arg("target"), py::arg("method") = "lm-chan", py::arg("seed") = 0);

  m.def(
      "ik_bench_csv",
      [](const RobotModel& r, const std::vector<std::string>& methods, int problems, std::uint64_t seed) {
        std::vector<IkMethod> ms;
        for (const auto& s : methods) ms.push_back(IkMethod::parse(s));
        BenchmarkOptions opts;
        opts.problems = problems;
        opts.seed = seed;
        BenchmarkReport rep;
        {
          py::gil_scoped_release release;
          rep = run_benchmark(r, ms, opts);
        }
        return benchmark_csv(rep);
      },
      py::arg("model"), py::arg("methods"), py::arg("problems") = 100, py::arg("seed") = 0);
}

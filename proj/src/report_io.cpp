#include "dkt/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace dkt {

namespace {

const char* const kBenchmarkColumns[] = {"Method",         "Mean Iter.",   "Median Iter.",
                                         "Infeasible Count", "Mean Searches", "Max Searches",
                                         "Joint Limit Violations", "Time per Iter.", "Median Time"};

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string benchmark_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(kBenchmarkColumns); ++i) out << (i ? "," : "") << kBenchmarkColumns[i];
  out << '\n';
  for (const auto& r : report.rows) {
    out << r.method << ',' << format_number(r.mean_iterations) << ',' << format_number(r.median_iterations) << ','
        << r.infeasible << ',' << format_number(r.mean_searches) << ',' << r.max_searches << ',' << r.violations
        << ',' << format_number(r.time_per_iter) << ',' << format_number(r.median_time) << '\n';
  }
  return out.str();
}

std::string benchmark_json(const BenchmarkReport& report) {
  nlohmann::ordered_json j;
  j["model"] = report.model;
  j["problems"] = report.problems;
  j["seed"] = report.seed;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row[kBenchmarkColumns[0]] = r.method;
    row[kBenchmarkColumns[1]] = number(r.mean_iterations);
    row[kBenchmarkColumns[2]] = number(r.median_iterations);
    row[kBenchmarkColumns[3]] = r.infeasible;
    row[kBenchmarkColumns[4]] = number(r.mean_searches);
    row[kBenchmarkColumns[5]] = r.max_searches;
    row[kBenchmarkColumns[6]] = r.violations;
    row[kBenchmarkColumns[7]] = number(r.time_per_iter);
    row[kBenchmarkColumns[8]] = number(r.median_time);
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string trace_csv(const ServoTrace& trace) {
  std::ostringstream out;
  out << 't';
  for (int i = 0; i < trace.n; ++i) out << ",q" << i;
  for (int i = 0; i < trace.n; ++i) out << ",qd" << i;
  out << ",err,m_rot,m_trans";
  for (int i = 0; i < 6; ++i) out << ",delta" << i;
  out << ",dampers,status\n";
  for (const auto& r : trace.records) {
    out << format_number(r.t);
    for (int i = 0; i < trace.n; ++i) out << ',' << format_number(r.q[i]);
    for (int i = 0; i < trace.n; ++i) out << ',' << format_number(r.qd[i]);
    out << ',' << format_number(r.err) << ',' << format_number(r.m_rot) << ',' << format_number(r.m_trans);
    for (int i = 0; i < 6; ++i) out << ',' << format_number(r.delta[i]);
    out << ',' << r.dampers << ',' << status_name(r.status) << '\n';
  }
  return out.str();
}

std::string trace_json(const ServoTrace& trace) {
  nlohmann::ordered_json j;
  j["controller"] = trace.controller;
  j["dt"] = number(trace.dt);
  j["status"] = std::string(status_name(trace.status));
  if (!trace.message.empty()) j["message"] = trace.message;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : trace.records) {
    nlohmann::ordered_json row;
    row["t"] = number(r.t);
    std::vector<nlohmann::json> q, qd, delta;
    for (int i = 0; i < trace.n; ++i) q.push_back(number(r.q[i]));
    for (int i = 0; i < trace.n; ++i) qd.push_back(number(r.qd[i]));
    for (int i = 0; i < 6; ++i) delta.push_back(number(r.delta[i]));
    row["q"] = q;
    row["qd"] = qd;
    row["err"] = number(r.err);
    row["m_rot"] = number(r.m_rot);
    row["m_trans"] = number(r.m_trans);
    row["delta"] = delta;
    row["dampers"] = r.dampers;
    row["status"] = std::string(status_name(r.status));
    j["records"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string matrix_csv(const MatX& m) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_number(m(r, c));
    out << '\n';
  }
  return out.str();
}

std::string matrix_json(const MatX& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<nlohmann::json> row;
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(row);
  }
  return rows.dump() + "\n";
}

}  // namespace dkt

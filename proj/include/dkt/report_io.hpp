#pragma once

#include <string>
#include <vector>

#include "dkt/benchmark.hpp"
#include "dkt/servo.hpp"

namespace dkt {

/// 9 significant digits; "nan" and "inf" spelled out.
std::string format_number(double v);

/// Header: Method, Mean Iter., Median Iter., Infeasible Count, Mean Searches,
/// Max Searches, Joint Limit Violations, Time per Iter., Median Time.
std::string benchmark_csv(const BenchmarkReport& report);
std::string benchmark_json(const BenchmarkReport& report);

/// Columns t, q*, qd*, err, m_rot, m_trans, delta0..delta5, dampers, status.
std::string trace_csv(const ServoTrace& trace);
std::string trace_json(const ServoTrace& trace);

/// Rows separated by newlines, entries by commas.
std::string matrix_csv(const MatX& m);
/// Array of rows.
std::string matrix_json(const MatX& m);

}  // namespace dkt

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dkt/ik.hpp"

namespace dkt {

/// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent generator for (seed, problem index, stream).
std::mt19937_64 problem_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

/// Worker count: DKT_THREADS when set and positive, else hardware concurrency.
int worker_threads();

/// Target poses fkine(q*) with q* uniform within the joint limits.
std::vector<Mat4> benchmark_problems(const RobotModel& model, int count, std::uint64_t seed);

struct BenchmarkOptions {
  int problems = 1000;
  std::uint64_t seed = 0;
  int threads = 0;      // 0: worker_threads()
  bool timing = false;  // fill the two time columns (not reproducible)
  IkParams params;
};

/// One table row.
struct MethodReport {
  std::string method;
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
  int infeasible = 0;
  double mean_searches = 0.0;
  int max_searches = 0;
  int violations = 0;         // solved problems whose solution leaves the limits
  double time_per_iter = 0.0; // relative to the fastest method, NaN without timing
  double median_time = 0.0;   // time_per_iter * median_iterations
  double ns_per_iter = 0.0;
  std::vector<IkResult> results;
};

struct BenchmarkReport {
  std::string model;
  int problems = 0;
  std::uint64_t seed = 0;
  std::vector<MethodReport> rows;
};

/// Runs every method on the same problems and the same search starts.
BenchmarkReport run_benchmark(const RobotModel& model, const std::vector<IkMethod>& methods,
                              const BenchmarkOptions& opts);

}  // namespace dkt

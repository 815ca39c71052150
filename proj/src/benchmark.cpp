#include "dkt/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace dkt {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 problem_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ index) ^ stream));
}

int worker_threads() {
  if (const char* env = std::getenv("DKT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Mat4> benchmark_problems(const RobotModel& model, int count, std::uint64_t seed) {
  std::vector<Mat4> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto rng = problem_rng(seed, static_cast<std::uint64_t>(i), 0);
    out.push_back(fkine(model.ets(), random_q(model, rng)));
  }
  return out;
}

namespace {

template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

BenchmarkReport run_benchmark(const RobotModel& model, const std::vector<IkMethod>& methods,
                              const BenchmarkOptions& opts) {
  BenchmarkReport report;
  report.model = model.name();
  report.problems = opts.problems;
  report.seed = opts.seed;
  const std::vector<Mat4> problems = benchmark_problems(model, opts.problems, opts.seed);
  const int threads = opts.threads > 0 ? opts.threads : worker_threads();

  for (const IkMethod& method : methods) {
    MethodReport row;
    row.method = method.name();
    row.results.resize(problems.size());
    parallel_for(static_cast<int>(problems.size()), threads, [&](int i) {
      auto rng = problem_rng(opts.seed, static_cast<std::uint64_t>(i), 1);
      row.results[i] = global_search(model, problems[i], method, opts.params, rng);
    });

    std::vector<double> iters;
    double searches = 0.0;
    double ns = 0.0;
    double total_iters = 0.0;
    for (const IkResult& r : row.results) {
      iters.push_back(r.iterations);
      total_iters += r.iterations;
      searches += r.searches;
      ns += static_cast<double>(r.wall_ns);
      row.max_searches = std::max(row.max_searches, r.searches);
      if (!r.success) ++row.infeasible;
      if (r.success && r.limit_violations > 0) ++row.violations;
    }
    const double count = std::max<double>(1.0, static_cast<double>(row.results.size()));
    row.mean_iterations = total_iters / count;
    row.median_iterations = median(iters);
    row.mean_searches = searches / count;
    row.ns_per_iter = total_iters > 0 ? ns / total_iters : 0.0;
    report.rows.push_back(std::move(row));
  }

  double fastest = std::numeric_limits<double>::infinity();
  for (const auto& row : report.rows) {
    if (row.ns_per_iter > 0.0) fastest = std::min(fastest, row.ns_per_iter);
  }
  for (auto& row : report.rows) {
    if (opts.timing && std::isfinite(fastest)) {
      row.time_per_iter = row.ns_per_iter / fastest;
      row.median_time = row.time_per_iter * row.median_iterations;
    } else {
      row.time_per_iter = std::numeric_limits<double>::quiet_NaN();
      row.median_time = std::numeric_limits<double>::quiet_NaN();
      row.ns_per_iter = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

}  // namespace dkt

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dkt/velocity_control.hpp"

namespace dkt {

enum class IkBase { nr, lm_wampler, lm_chan, lm_sugihara, qp };
enum class NullMode { none, sigma, sigma_jm };

/// A solver variant, named like "lm-chan+", "nr-null-sigma-jm" or "qp".
/// "+" rejects solutions outside the joint limits and retries.
struct IkMethod {
  IkBase base = IkBase::lm_chan;
  bool reject = false;
  NullMode null = NullMode::none;

  std::string name() const;
  static IkMethod parse(std::string_view s);
  /// Every name accepted by parse().
  static std::vector<std::string> valid_names();
};

struct IkParams {
  int step_limit = 30;
  int search_limit = 100;
  double tol = 1e-6;
  Vec6 we = Vec6::Ones();  // diagonal of the error weight
  double wampler_lambda = 1e-4;
  double chan_lambda = 0.1;
  double sugihara_wn = 0.001;
  double lambda_sigma = 10.0;
  double lambda_m = 1e4;
  // qp method
  double lambda_q = 0.01;
  double kappa = 10.0;
  DamperConfig damper{9.999999, 10.0, 1e-7};
};

struct IkResult {
  VecX q;
  bool success = false;
  int iterations = 0;
  int searches = 0;
  double residual = 0.0;
  int limit_violations = 0;
  std::int64_t wall_ns = 0;
};

/// Per-joint signed limit penalty: -((q - qbar_M) / (q_M - qbar_M))^2 above
/// the upper threshold, +((q - qbar_m) / (q_m - qbar_m))^2 below the lower one.
VecX nullspace_penalty_sigma(const RobotModel& model, const VecX& q);

/// LM damping matrix diagonal for the given base and error.
VecX lm_damping(IkBase base, const Vec6& e, int n, const IkParams& params);

/// One increment of the chosen method at q for error e.
VecX ik_step(const RobotModel& model, const VecX& q, const Vec6& e, const IkMethod& method, const IkParams& params);

/// One search from q0: at most step_limit steps. On success revolute joints are
/// shifted by multiples of 2 pi into their limits where possible, otherwise into (-pi, pi].
IkResult ik_solve(const RobotModel& model, const Mat4& td, const VecX& q0, const IkMethod& method,
                  const IkParams& params);

IkResult ik_nr(const RobotModel& model, const Mat4& td, const VecX& q0, const IkParams& params = {});
IkResult ik_lm(const RobotModel& model, const Mat4& td, const VecX& q0, IkBase damping,
               const IkParams& params = {});
/// Throws NotRedundant when n <= 6.
IkResult ik_with_nullspace(const RobotModel& model, const Mat4& td, const VecX& q0, IkBase base, bool use_jm,
                           const IkParams& params = {});
IkResult ik_qp(const RobotModel& model, const Mat4& td, const VecX& q0, const IkParams& params = {});

/// Uniform double in [0, 1) from the top 53 bits of one draw. Identical on
/// every platform, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng);

/// Uniform sample within the joint limits.
VecX random_q(const RobotModel& model, std::mt19937_64& rng);

/// Restarts from fresh uniform samples until success or search_limit searches.
IkResult global_search(const RobotModel& model, const Mat4& td, const IkMethod& method, const IkParams& params,
                       std::mt19937_64& rng);

}  // namespace dkt

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dkt/se3.hpp"

namespace dkt {

/// One factor of the transform sequence: a constant rotation/translation or a
/// joint-driven one.
struct ElementaryTransform {
  Axis axis = Axis::tz;
  double constant = 0.0;  // ignored when joint >= 0
  int joint = -1;         // 0-based joint index, -1 for constant transforms

  static ElementaryTransform fixed(Axis a, double value) { return {a, value, -1}; }
  static ElementaryTransform variable(Axis a, int j) { return {a, 0.0, j}; }

  bool is_joint() const noexcept { return joint >= 0; }
  Mat4 eval(double value) const { return elementary(axis, value); }
};

/// Elementary transform sequence. Joint transforms appear in joint order and
/// each joint index appears exactly once.
class Ets {
 public:
  Ets() = default;
  explicit Ets(std::vector<ElementaryTransform> transforms);

  int n() const noexcept { return static_cast<int>(mu_.size()); }
  int size() const noexcept { return static_cast<int>(transforms_.size()); }
  const std::vector<ElementaryTransform>& transforms() const noexcept { return transforms_; }
  const ElementaryTransform& operator[](int i) const { return transforms_[i]; }

  /// Sequence index of the transform driven by joint j.
  int mu(int j) const { return mu_.at(j); }
  Axis joint_axis(int j) const { return transforms_[mu(j)].axis; }
  bool is_prismatic(int j) const { return !is_rotation(joint_axis(j)); }

  /// Transform i evaluated at q (q ignored for constant transforms).
  Mat4 eval(int i, const VecX& q) const;

 private:
  std::vector<ElementaryTransform> transforms_;
  std::vector<int> mu_;
};

Mat4 fkine(const Ets& ets, const VecX& q);

/// dT/dq_j.
Mat4 partial_fkine(const Ets& ets, const VecX& q, int j);

/// d^2T/(dq_j dq_k), evaluated as a single product over the whole sequence.
Mat4 second_partial_fkine(const Ets& ets, const VecX& q, int j, int k);

/// Kinematic structure plus joint position and velocity limits.
class RobotModel {
 public:
  RobotModel() = default;
  /// Thresholds default to 5% of the joint range inside each limit. Empty
  /// qd_max means unbounded joint velocity.
  RobotModel(std::string name, Ets ets, VecX q_min, VecX q_max, VecX qd_max = {});
  RobotModel(std::string name, Ets ets, VecX q_min, VecX q_max, VecX qd_max, VecX thresh_min,
             VecX thresh_max);

  const std::string& name() const noexcept { return name_; }
  const Ets& ets() const noexcept { return ets_; }
  int n() const noexcept { return ets_.n(); }

  const VecX& q_min() const noexcept { return q_min_; }
  const VecX& q_max() const noexcept { return q_max_; }
  const VecX& qd_max() const noexcept { return qd_max_; }
  const VecX& thresh_min() const noexcept { return thresh_min_; }
  const VecX& thresh_max() const noexcept { return thresh_max_; }

  bool within_limits(const VecX& q) const;
  /// Number of joints outside [q_min, q_max].
  int limit_violations(const VecX& q) const;

 private:
  void validate() const;

  std::string name_;
  Ets ets_;
  VecX q_min_, q_max_, qd_max_, thresh_min_, thresh_max_;
};

/// Parses the line-oriented ETS text format. Joints without a `limits` line
/// get [-pi, pi]; joints without `vmax` are unbounded.
RobotModel parse_ets(std::string_view text);

/// Canonical text: name, transforms, limits, vmax; floats with 17 significant digits.
std::string serialize_ets(const RobotModel& model);

/// Names accepted by builtin_model().
std::vector<std::string> builtin_model_names();

/// "panda", "ur5" or "narrow7".
RobotModel builtin_model(std::string_view name);

/// Builtin name, or else a path to an ETS file.
RobotModel load_model(const std::string& name_or_path);

}  // namespace dkt

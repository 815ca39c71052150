#pragma once

#include <string_view>

#include "dkt/kinematics.hpp"

namespace dkt {

/// Which rows of J enter the manipulability measure.
enum class Axes { translational, rotational, all };

std::string_view axes_name(Axes a) noexcept;
Axes parse_axes(std::string_view s);

/// Rows 0-2, 3-5 or all six of a 6 x n matrix.
MatX select_rows(const Mat6X& m, Axes axes);

/// Yoshikawa index sqrt(det(Jh Jh^T)) of an explicit row selection. Negative
/// round-off in the determinant is clamped to zero.
double manipulability_from(const MatX& jhat);

/// Gradient of manipulability_from with respect to q, given hhat[i] = dJhat/dq_i.
/// Throws SingularGram when m <= 1e-8.
VecX manipulability_jacobian_from(const MatX& jhat, const std::vector<MatX>& hhat);

double manipulability(const Mat6X& j, Axes axes);
VecX manipulability_jacobian(const Mat6X& j, const Hessian& h, Axes axes);

double manipulability(const Ets& ets, const VecX& q, Axes axes = Axes::all);
VecX manipulability_jacobian(const Ets& ets, const VecX& q, Axes axes = Axes::all);

}  // namespace dkt

#include "dkt/manipulability.hpp"

#include <cmath>
#include <string>

#include "dkt/errors.hpp"

namespace dkt {

std::string_view axes_name(Axes a) noexcept {
  switch (a) {
    case Axes::translational: return "translational";
    case Axes::rotational: return "rotational";
    case Axes::all: return "all";
  }
  return "?";
}

Axes parse_axes(std::string_view s) {
  if (s == "translational" || s == "trans") return Axes::translational;
  if (s == "rotational" || s == "rot") return Axes::rotational;
  if (s == "all") return Axes::all;
  throw Error("unknown axes selector '" + std::string(s) + "'");
}

MatX select_rows(const Mat6X& m, Axes axes) {
  switch (axes) {
    case Axes::translational: return m.topRows<3>();
    case Axes::rotational: return m.bottomRows<3>();
    case Axes::all: break;
  }
  return m;
}

double manipulability_from(const MatX& jhat) {
  const MatX g = jhat * jhat.transpose();
  return std::sqrt(std::max(g.determinant(), 0.0));
}

VecX manipulability_jacobian_from(const MatX& jhat, const std::vector<MatX>& hhat) {
  const double m = manipulability_from(jhat);
  if (m <= 1e-8) throw SingularGram("manipulability " + std::to_string(m) + " too small for a gradient");
  const MatX g = jhat * jhat.transpose();
  Eigen::LLT<MatX> llt(g);
  if (llt.info() != Eigen::Success) throw SingularGram("J J^T is not positive definite");
  const MatX ginv = llt.solve(MatX::Identity(g.rows(), g.cols()));
  const Eigen::Map<const VecX> vginv(ginv.data(), ginv.size());

  VecX jm(hhat.size());
  for (std::size_t i = 0; i < hhat.size(); ++i) {
    const MatX jh = jhat * hhat[i].transpose();
    jm[static_cast<Eigen::Index>(i)] = m * Eigen::Map<const VecX>(jh.data(), jh.size()).dot(vginv);
  }
  return jm;
}

double manipulability(const Mat6X& j, Axes axes) { return manipulability_from(select_rows(j, axes)); }

VecX manipulability_jacobian(const Mat6X& j, const Hessian& h, Axes axes) {
  std::vector<MatX> hhat;
  hhat.reserve(h.size());
  for (const auto& s : h) hhat.push_back(select_rows(s, axes));
  return manipulability_jacobian_from(select_rows(j, axes), hhat);
}

double manipulability(const Ets& ets, const VecX& q, Axes axes) {
  return manipulability(jacobian(ets, q), axes);
}

VecX manipulability_jacobian(const Ets& ets, const VecX& q, Axes axes) {
  const Mat6X j = jacobian(ets, q);
  return manipulability_jacobian(j, hessian_fast(j), axes);
}

}  // namespace dkt

#include "dkt/ets.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dkt/errors.hpp"

namespace dkt {

namespace {

void check_q(const Ets& ets, const VecX& q) {
  if (q.size() != ets.n()) {
    throw DimensionError("expected " + std::to_string(ets.n()) + " joint values, got " +
                         std::to_string(q.size()));
  }
}

void check_joint(const Ets& ets, int j) {
  if (j < 0 || j >= ets.n()) {
    throw IndexError("joint index " + std::to_string(j) + " out of range for " +
                     std::to_string(ets.n()) + " joints");
  }
}

// dE/dq for the transform driven by a joint.
Mat4 first_factor(const ElementaryTransform& e, double value) {
  if (is_rotation(e.axis)) return generator(e.axis) * e.eval(value);
  return generator(e.axis);
}

Mat4 second_factor(const ElementaryTransform& e, double value) {
  if (is_rotation(e.axis)) {
    const Mat4 g = generator(e.axis);
    return g * g * e.eval(value);
  }
  return Mat4::Zero();
}

}  // namespace

Ets::Ets(std::vector<ElementaryTransform> transforms) : transforms_(std::move(transforms)) {
  int joints = 0;
  for (const auto& e : transforms_) {
    if (e.is_joint()) ++joints;
  }
  mu_.assign(joints, -1);
  int expected = 0;
  for (int i = 0; i < size(); ++i) {
    const auto& e = transforms_[i];
    if (!e.is_joint()) continue;
    if (e.joint >= joints) {
      throw ModelError("joint index q" + std::to_string(e.joint) + " exceeds joint count " +
                       std::to_string(joints));
    }
    if (mu_[e.joint] >= 0) throw ModelError("duplicate joint index q" + std::to_string(e.joint));
    if (e.joint != expected) {
      throw ModelError("joint q" + std::to_string(e.joint) + " appears out of order (expected q" +
                       std::to_string(expected) + ")");
    }
    mu_[e.joint] = i;
    ++expected;
  }
}

Mat4 Ets::eval(int i, const VecX& q) const {
  const auto& e = transforms_[i];
  return e.eval(e.is_joint() ? q[e.joint] : e.constant);
}

Mat4 fkine(const Ets& ets, const VecX& q) {
  check_q(ets, q);
  Mat4 t = Mat4::Identity();
  for (int i = 0; i < ets.size(); ++i) t = t * ets.eval(i, q);
  return t;
}

Mat4 partial_fkine(const Ets& ets, const VecX& q, int j) {
  check_q(ets, q);
  check_joint(ets, j);
  const int mj = ets.mu(j);
  Mat4 t = Mat4::Identity();
  for (int i = 0; i < ets.size(); ++i) {
    t = t * (i == mj ? first_factor(ets[i], q[j]) : ets.eval(i, q));
  }
  return t;
}

Mat4 second_partial_fkine(const Ets& ets, const VecX& q, int j, int k) {
  check_q(ets, q);
  check_joint(ets, j);
  check_joint(ets, k);
  const int mj = ets.mu(j);
  const int mk = ets.mu(k);
  Mat4 t = Mat4::Identity();
  for (int i = 0; i < ets.size(); ++i) {
    if (i == mj && i == mk) {
      t = t * second_factor(ets[i], q[j]);
    } else if (i == mj) {
      t = t * first_factor(ets[i], q[j]);
    } else if (i == mk) {
      t = t * first_factor(ets[i], q[k]);
    } else {
      t = t * ets.eval(i, q);
    }
  }
  return t;
}

RobotModel::RobotModel(std::string name, Ets ets, VecX q_min, VecX q_max, VecX qd_max)
    : name_(std::move(name)), ets_(std::move(ets)), q_min_(std::move(q_min)), q_max_(std::move(q_max)) {
  const int n = ets_.n();
  qd_max_ = qd_max.size() == 0 ? VecX::Constant(n, std::numeric_limits<double>::infinity())
                               : std::move(qd_max);
  if (q_min_.size() == n && q_max_.size() == n) {
    const VecX band = 0.05 * (q_max_ - q_min_);
    thresh_min_ = q_min_ + band;
    thresh_max_ = q_max_ - band;
  }
  validate();
}

RobotModel::RobotModel(std::string name, Ets ets, VecX q_min, VecX q_max, VecX qd_max,
                       VecX thresh_min, VecX thresh_max)
    : name_(std::move(name)),
      ets_(std::move(ets)),
      q_min_(std::move(q_min)),
      q_max_(std::move(q_max)),
      qd_max_(std::move(qd_max)),
      thresh_min_(std::move(thresh_min)),
      thresh_max_(std::move(thresh_max)) {
  validate();
}

void RobotModel::validate() const {
  const int n = ets_.n();
  if (q_min_.size() != n || q_max_.size() != n || qd_max_.size() != n || thresh_min_.size() != n ||
      thresh_max_.size() != n) {
    throw ModelError("limit vectors must have one entry per joint");
  }
  for (int i = 0; i < n; ++i) {
    const std::string q = "q" + std::to_string(i);
    if (!(q_min_[i] < q_max_[i])) throw ModelError("limits inconsistent for " + q + ": min >= max");
    if (!(qd_max_[i] > 0.0)) throw ModelError("vmax for " + q + " must be positive");
    if (!(thresh_min_[i] > q_min_[i] && thresh_min_[i] < q_max_[i] && thresh_max_[i] > q_min_[i] &&
          thresh_max_[i] < q_max_[i] && thresh_min_[i] < thresh_max_[i])) {
      throw ModelError("limit thresholds inconsistent for " + q);
    }
  }
}

bool RobotModel::within_limits(const VecX& q) const { return limit_violations(q) == 0; }

int RobotModel::limit_violations(const VecX& q) const {
  int count = 0;
  for (int i = 0; i < n(); ++i) {
    if (q[i] < q_min_[i] || q[i] > q_max_[i]) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && !(line[j] == ' ' || line[j] == '\t' || line[j] == '\r')) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

bool is_joint_token(std::string_view s) { return s.size() >= 2 && s[0] == 'q'; }

int parse_joint(std::string_view s, int line) {
  if (!is_joint_token(s)) throw ParseError(line, "expected joint token q<j>, got '" + std::string(s) + "'");
  int j = -1;
  auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), j);
  if (ec != std::errc() || ptr != s.data() + s.size() || j < 0) {
    throw ParseError(line, "bad joint index '" + std::string(s) + "'");
  }
  return j;
}

bool is_axis_token(std::string_view s) {
  return s == "Rx" || s == "Ry" || s == "Rz" || s == "tx" || s == "ty" || s == "tz";
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RobotModel parse_ets(std::string_view text) {
  std::string name;
  std::vector<ElementaryTransform> transforms;
  struct Limit {
    int line;
    int joint;
    double lo, hi;
  };
  struct Vmax {
    int line;
    int joint;
    double v;
  };
  std::vector<Limit> limits;
  std::vector<Vmax> vmaxes;
  std::vector<int> joint_lines;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    if (tok[0] == "name") {
      if (tok.size() < 2) throw ParseError(line_no, "name requires a value");
      const auto start = line.find(tok[1]);
      std::string_view rest = line.substr(start);
      while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t' || rest.back() == '\r')) {
        rest.remove_suffix(1);
      }
      name = std::string(rest);
    } else if (is_axis_token(tok[0])) {
      if (tok.size() != 2) throw ParseError(line_no, "transform line takes exactly one argument");
      const Axis a = parse_axis(tok[0]);
      if (is_joint_token(tok[1])) {
        const int j = parse_joint(tok[1], line_no);
        for (const auto& e : transforms) {
          if (e.joint == j) throw ParseError(line_no, "duplicate joint index q" + std::to_string(j));
        }
        transforms.push_back(ElementaryTransform::variable(a, j));
        joint_lines.push_back(line_no);
      } else {
        transforms.push_back(ElementaryTransform::fixed(a, parse_double(tok[1], line_no)));
      }
    } else if (tok[0] == "limits") {
      if (tok.size() != 4) throw ParseError(line_no, "limits takes q<j> <min> <max>");
      limits.push_back({line_no, parse_joint(tok[1], line_no), parse_double(tok[2], line_no),
                        parse_double(tok[3], line_no)});
    } else if (tok[0] == "vmax") {
      if (tok.size() != 3) throw ParseError(line_no, "vmax takes q<j> <value>");
      vmaxes.push_back({line_no, parse_joint(tok[1], line_no), parse_double(tok[2], line_no)});
    } else {
      throw ParseError(line_no, "unknown keyword '" + std::string(tok[0]) + "'");
    }
    if (eol == text.size()) break;
  }

  Ets ets;
  try {
    ets = Ets(std::move(transforms));
  } catch (const ModelError& e) {
    throw ParseError(0, e.what());
  }
  const int n = ets.n();
  VecX q_min = VecX::Constant(n, -M_PI);
  VecX q_max = VecX::Constant(n, M_PI);
  VecX qd_max = VecX::Constant(n, std::numeric_limits<double>::infinity());
  std::vector<bool> seen_limit(n, false), seen_vmax(n, false);
  for (const auto& l : limits) {
    if (l.joint >= n) throw ParseError(l.line, "limits for unknown joint q" + std::to_string(l.joint));
    if (seen_limit[l.joint]) throw ParseError(l.line, "duplicate limits for q" + std::to_string(l.joint));
    if (!(l.lo < l.hi)) throw ParseError(l.line, "limits inconsistent: min >= max");
    seen_limit[l.joint] = true;
    q_min[l.joint] = l.lo;
    q_max[l.joint] = l.hi;
  }
  for (const auto& v : vmaxes) {
    if (v.joint >= n) throw ParseError(v.line, "vmax for unknown joint q" + std::to_string(v.joint));
    if (seen_vmax[v.joint]) throw ParseError(v.line, "duplicate vmax for q" + std::to_string(v.joint));
    if (!(v.v > 0.0)) throw ParseError(v.line, "vmax must be positive");
    seen_vmax[v.joint] = true;
    qd_max[v.joint] = v.v;
  }
  try {
    return RobotModel(name, std::move(ets), q_min, q_max, qd_max);
  } catch (const ModelError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize_ets(const RobotModel& model) {
  std::ostringstream out;
  if (!model.name().empty()) out << "name " << model.name() << '\n';
  for (const auto& e : model.ets().transforms()) {
    out << axis_name(e.axis) << ' ';
    if (e.is_joint()) {
      out << 'q' << e.joint;
    } else {
      out << fmt17(e.constant);
    }
    out << '\n';
  }
  for (int j = 0; j < model.n(); ++j) {
    out << "limits q" << j << ' ' << fmt17(model.q_min()[j]) << ' ' << fmt17(model.q_max()[j]) << '\n';
  }
  for (int j = 0; j < model.n(); ++j) {
    if (std::isfinite(model.qd_max()[j])) out << "vmax q" << j << ' ' << fmt17(model.qd_max()[j]) << '\n';
  }
  return out.str();
}

RobotModel load_model(const std::string& name_or_path) {
  for (const auto& b : builtin_model_names()) {
    if (b == name_or_path) return builtin_model(name_or_path);
  }
  std::ifstream in(name_or_path);
  if (!in) throw Error("unknown model '" + name_or_path + "' (not a builtin name or readable file)");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ets(ss.str());
}

}  // namespace dkt

#include <string>
#include <string_view>

#include "dkt/errors.hpp"
#include "dkt/ets.hpp"

namespace dkt {

namespace {

// Kept byte-identical to the files under models/.
constexpr std::string_view kPanda = R"ets(# Franka Emika Panda, flange frame rotated -45 deg about z
name panda
tz 0.33300000000000002
Rz q0
Rx -1.5707963267948966
Rz q1
Rx 1.5707963267948966
tz 0.316
Rz q2
tx 0.082500000000000004
Rx 1.5707963267948966
Rz q3
tx -0.082500000000000004
Rx -1.5707963267948966
tz 0.38400000000000001
Rz q4
Rx 1.5707963267948966
Rz q5
tx 0.087999999999999995
Rx 1.5707963267948966
tz 0.107
Rz q6
tz 0.10299999999999999
Rz -0.78539816339744828
limits q0 -2.8973 2.8973
limits q1 -1.7627999999999999 1.7627999999999999
limits q2 -2.8973 2.8973
limits q3 -3.0718000000000001 -0.069800000000000001
limits q4 -2.8973 2.8973
limits q5 -0.017500000000000002 3.7524999999999999
limits q6 -2.8973 2.8973
vmax q0 2.1749999999999998
vmax q1 2.1749999999999998
vmax q2 2.1749999999999998
vmax q3 2.1749999999999998
vmax q4 2.6099999999999999
vmax q5 2.6099999999999999
vmax q6 2.6099999999999999
)ets";

constexpr std::string_view kUr5 = R"ets(# Universal Robots UR5
name ur5
tz 0.089159000000000002
Rz q0
Rx 1.5707963267948966
Rz q1
tx -0.42499999999999999
Rz q2
tx -0.39224999999999999
tz 0.10915
Rz q3
Rx 1.5707963267948966
tz 0.094649999999999998
Rz q4
Rx -1.5707963267948966
tz 0.082299999999999998
Rz q5
limits q0 -3.1415926535897931 3.1415926535897931
limits q1 -3.1415926535897931 3.1415926535897931
limits q2 -3.1415926535897931 3.1415926535897931
limits q3 -3.1415926535897931 3.1415926535897931
limits q4 -3.1415926535897931 3.1415926535897931
limits q5 -3.1415926535897931 3.1415926535897931
vmax q0 3.1415926535897931
vmax q1 3.1415926535897931
vmax q2 3.1415926535897931
vmax q3 3.1415926535897931
vmax q4 3.1415926535897931
vmax q5 3.1415926535897931
)ets";

constexpr std::string_view kNarrow7 = R"ets(# Panda kinematics with joints 1, 3 and 5 limited to 20 deg around the ready pose
name narrow7
tz 0.33300000000000002
Rz q0
Rx -1.5707963267948966
Rz q1
Rx 1.5707963267948966
tz 0.316
Rz q2
tx 0.082500000000000004
Rx 1.5707963267948966
Rz q3
tx -0.082500000000000004
Rx -1.5707963267948966
tz 0.38400000000000001
Rz q4
Rx 1.5707963267948966
Rz q5
tx 0.087999999999999995
Rx 1.5707963267948966
tz 0.107
Rz q6
tz 0.10299999999999999
Rz -0.78539816339744828
limits q0 -2.8973 2.8973
limits q1 -0.47453292519943291 -0.12546707480056704
limits q2 -2.8973 2.8973
limits q3 -2.3745329251994329 -2.0254670748005674
limits q4 -2.8973 2.8973
limits q5 1.825467074800567 2.1745329251994328
limits q6 -2.8973 2.8973
vmax q0 2.1749999999999998
vmax q1 2.1749999999999998
vmax q2 2.1749999999999998
vmax q3 2.1749999999999998
vmax q4 2.6099999999999999
vmax q5 2.6099999999999999
vmax q6 2.6099999999999999
)ets";

}  // namespace

std::vector<std::string> builtin_model_names() { return {"panda", "ur5", "narrow7"}; }

RobotModel builtin_model(std::string_view name) {
  if (name == "panda") return parse_ets(kPanda);
  if (name == "ur5") return parse_ets(kUr5);
  if (name == "narrow7") return parse_ets(kNarrow7);
  throw ModelError("unknown builtin model '" + std::string(name) + "'");
}

}  // namespace dkt

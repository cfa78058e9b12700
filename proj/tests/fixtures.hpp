#pragma once

// Shared instance texts for the test suite. camera_text() is the robot
// grasping domain used across modules: a camera that needs one time unit to
// boot, and a grasp that must not start in the first time unit unless the
// camera is already on.

#include <string>

namespace fixtures {

inline std::string camera_header() {
  return R"(objects { o1: obj; l1: loc; }

fluents {
  obj_at(obj, loc);
  holding(obj);
  grasping(obj);
  cam_on;
  cam_booting;
}

clocks { c_cam; }

action start_grasp(o: obj, l: loc) {
  owner: controller;
  pre: obj_at(o, l) & !grasping(o) & !holding(o);
}
action end_grasp(o: obj, l: loc) {
  owner: controller;
  pre: grasping(o);
}
action start_cam {
  owner: controller;
  pre: !cam_on;
}
action end_cam {
  owner: controller;
  pre: cam_booting;
  guard: c_cam == 1;
}

ssa grasping(o: obj):
  (exists l: loc. a == start_grasp(o, l))
  | grasping(o) & !(exists l: loc. a == end_grasp(o, l));
ssa holding(o: obj):
  (exists l: loc. a == end_grasp(o, l))
  | holding(o) & !(exists o2: obj, l2: loc. a == start_grasp(o2, l2));
ssa obj_at(o: obj, l: loc): obj_at(o, l) & a != start_grasp(o, l);
ssa cam_on: a == end_cam | cam_on;
ssa cam_booting: a == start_cam | cam_booting & a != end_cam;

reset c_cam: a == start_cam;

init { obj_at(o1, l1); }

)";
}

// Concurrent program: camera boot alongside the grasp. Controllable.
inline std::string camera_text() {
  return camera_header() +
         "program: (start_cam; end_cam) || (start_grasp(o1, l1); end_grasp(o1, l1));\n"
         "spec_bad: true U<=1 (!cam_on & grasping(o1));\n";
}

// Grasp only, no camera boot available. Uncontrollable.
inline std::string grasp_only_text() {
  return camera_header() +
         "program: start_grasp(o1, l1); end_grasp(o1, l1);\n"
         "spec_bad: true U<=1 (!cam_on & grasping(o1));\n";
}

// Camera boot loop before the grasp. The camera may be rebooted any number
// of times (start_cam keeps no precondition here), so the search tree is
// infinite and only terminates through domination pruning.
inline std::string camera_loop_text() {
  std::string text = camera_header();
  std::size_t at = text.find("pre: !cam_on;");
  text.replace(at, std::string("pre: !cam_on;").size(), "pre: true;");
  return text +
         "program: ((start_cam; end_cam))*; start_grasp(o1, l1); end_grasp(o1, l1);\n"
         "spec_bad: true U<=1 (!cam_on & grasping(o1));\n";
}

// Camera domain over two objects: real quantifier expansion (6 ground
// actions, 8 atoms).
inline std::string camera_two_objects_text() {
  std::string text = camera_header();
  std::size_t at = text.find("objects { o1: obj; l1: loc; }");
  text.replace(at, std::string("objects { o1: obj; l1: loc; }").size(),
               "objects { o1: obj; o2: obj; l1: loc; }");
  return text +
         "program: (start_cam; end_cam) || (start_grasp(o1, l1); end_grasp(o1, l1));\n"
         "spec_bad: true U<=1 (!cam_on & grasping(o1));\n";
}

// Small untyped two-action domain for parser and progression tests.
inline std::string toggle_text() {
  return R"(fluents { p; q; }
clocks { c; }
action set_p { owner: controller; pre: !p; }
action set_q { owner: environment; pre: p & !q; guard: c >= 1; }
ssa p: a == set_p | p;
ssa q: a == set_q | q;
reset c: a == set_p;
init { }
program: set_p; set_q;
spec_bad: F<=2 q;
)";
}

}  // namespace fixtures

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "tgs/dsl.hpp"
#include "tgs/source_ast.hpp"

using namespace tgs;

namespace {

std::string reprint(const std::string& text) {
  return ast::print_spec(dsl::parse_spec(text, "t.tgs"));
}

}  // namespace

TEST_CASE("camera instance parses with all declarations", "[dsl]") {
  auto spec = dsl::parse_spec(fixtures::camera_text(), "camera.tgs");
  REQUIRE(spec.objects.size() == 2);
  REQUIRE(spec.fluents.size() == 5);
  REQUIRE(spec.clocks.size() == 1);
  REQUIRE(spec.actions.size() == 4);
  REQUIRE(spec.ssas.size() == 5);
  REQUIRE(spec.resets.size() == 1);
  REQUIRE(spec.init.size() == 1);
  REQUIRE(spec.warnings.empty());

  const auto& end_cam = spec.actions[3];
  CHECK(end_cam.name == "end_cam");
  CHECK(end_cam.owner == Owner::Controller);
  REQUIRE(end_cam.guard.size() == 1);
  CHECK(end_cam.guard[0].clock == "c_cam");
  CHECK(end_cam.guard[0].op == CmpOp::Eq);
  CHECK(end_cam.guard[0].bound == Rational(1));

  REQUIRE(spec.program->kind == ast::PKind::Conc);
  CHECK(spec.program->children[0]->kind == ast::PKind::Seq);
  CHECK(spec.spec_bad->kind == ast::MKind::Until);
  CHECK(spec.spec_bad->ivl.contains(Rational(1)));
  CHECK_FALSE(spec.spec_bad->ivl.contains(Rational(3, 2)));
}

TEST_CASE("printing and reparsing is stable", "[dsl]") {
  for (const std::string& text :
       {fixtures::camera_text(), fixtures::grasp_only_text(),
        fixtures::camera_loop_text(), fixtures::toggle_text()}) {
    std::string once = reprint(text);
    std::string twice = reprint(once);
    CHECK(once == twice);
  }
}

TEST_CASE("reparsed program and spec are structurally equal", "[dsl]") {
  auto spec = dsl::parse_spec(fixtures::camera_text(), "camera.tgs");
  auto again = dsl::parse_spec(ast::print_spec(spec), "camera2.tgs");
  CHECK(ast::equals(spec.program, again.program));
  CHECK(ast::equals(spec.spec_bad, again.spec_bad));
  REQUIRE(spec.ssas.size() == again.ssas.size());
  for (std::size_t i = 0; i < spec.ssas.size(); ++i)
    CHECK(ast::equals(spec.ssas[i].rhs, again.ssas[i].rhs));
}

TEST_CASE("spec_good negates into spec_bad", "[dsl]") {
  std::string text = fixtures::camera_header() +
                     "program: start_cam; end_cam;\n"
                     "spec_good: G<=1 !grasping(o1);\n";
  auto spec = dsl::parse_spec(text, "t.tgs");
  CHECK(spec.spec_was_desired);
  // G expands to !(true U ...), so the stored formula is !!(true U ...).
  REQUIRE(spec.spec_bad->kind == ast::MKind::Not);
  REQUIRE(spec.spec_bad->children[0]->kind == ast::MKind::Not);
  CHECK(spec.spec_bad->children[0]->children[0]->kind == ast::MKind::Until);
}

TEST_CASE("formula precedence: not over and over or", "[dsl]") {
  auto m = dsl::parse_mtl("!p & q | r");
  REQUIRE(m->kind == ast::MKind::Or);
  REQUIRE(m->children[0]->kind == ast::MKind::And);
  CHECK(m->children[0]->children[0]->kind == ast::MKind::Not);
  CHECK(m->children[1]->kind == ast::MKind::Atom);
}

TEST_CASE("until binds loosest and is right-associative", "[dsl]") {
  auto m = dsl::parse_mtl("p & q U[0,1] r U(1,2) s");
  REQUIRE(m->kind == ast::MKind::Until);
  CHECK(m->children[0]->kind == ast::MKind::And);
  REQUIRE(m->children[1]->kind == ast::MKind::Until);
  CHECK(m->children[1]->ivl.lo_strict);
  CHECK(m->children[1]->ivl.hi_strict);
  CHECK_FALSE(m->ivl.lo_strict);
}

TEST_CASE("finally and globally expand through until", "[dsl]") {
  auto f = dsl::parse_mtl("F<=2 p");
  REQUIRE(f->kind == ast::MKind::Until);
  CHECK(f->children[0]->kind == ast::MKind::True);
  CHECK(f->ivl.contains(Rational(2)));
  CHECK_FALSE(f->ivl.contains(Rational(5, 2)));

  auto g = dsl::parse_mtl("G[0,2] p");
  auto expected = ast::m_not(ast::m_until(
      f->ivl, ast::m_true(), ast::m_not(ast::m_atom("p", {}))));
  CHECK(ast::equals(g, expected));
}

TEST_CASE("bare temporal operators default to the full horizon", "[dsl]") {
  auto m = dsl::parse_mtl("p U q");
  CHECK(m->ivl.hi_inf);
  CHECK(m->ivl.lo == Rational(0));
  CHECK(m->ivl.contains(Rational(1000)));
}

TEST_CASE("parenthesized right operand is not an interval", "[dsl]") {
  auto m = dsl::parse_mtl("p U (q & r)");
  REQUIRE(m->kind == ast::MKind::Until);
  CHECK(m->ivl.hi_inf);
  CHECK(m->children[1]->kind == ast::MKind::And);

  auto n = dsl::parse_mtl("p U(0,2) q");
  CHECK_FALSE(n->ivl.hi_inf);
  CHECK(n->ivl.lo_strict);
}

TEST_CASE("program operator precedence", "[dsl]") {
  std::string text = fixtures::camera_header() +
                     "program: start_cam; end_cam | start_grasp(o1, l1) || start_cam*;\n"
                     "spec_bad: F grasping(o1);\n";
  auto spec = dsl::parse_spec(text, "t.tgs");
  REQUIRE(spec.program->kind == ast::PKind::Conc);
  REQUIRE(spec.program->children[0]->kind == ast::PKind::Choice);
  CHECK(spec.program->children[0]->children[0]->kind == ast::PKind::Seq);
  CHECK(spec.program->children[1]->kind == ast::PKind::Star);
}

TEST_CASE("tests and nil in programs", "[dsl]") {
  std::string text = fixtures::camera_header() +
                     "program: ?(cam_on | grasping(o1)); nil; start_cam;\n"
                     "spec_bad: F grasping(o1);\n";
  auto spec = dsl::parse_spec(text, "t.tgs");
  REQUIRE(spec.program->kind == ast::PKind::Seq);
  REQUIRE(spec.program->children[0]->kind == ast::PKind::Seq);
  CHECK(spec.program->children[0]->children[0]->kind == ast::PKind::Test);
  CHECK(ast::is_nil(spec.program->children[0]->children[1]));
}

TEST_CASE("quantifier over an empty type warns and parses", "[dsl]") {
  std::string text = R"(objects { o1: obj; }
fluents { p(obj); }
clocks { }
action go { owner: controller; pre: forall g: ghost. p(o1); }
ssa p(o: obj): p(o);
init { }
program: go;
spec_bad: F p(o1);
)";
  auto spec = dsl::parse_spec(text, "t.tgs");
  REQUIRE(spec.warnings.size() == 1);
  CHECK(spec.warnings[0].find("empty type") != std::string::npos);
}

TEST_CASE("diagnostics carry file, line and column", "[dsl]") {
  std::string text = "objects { o1: obj; }\nfluents { p; }\nclocks { }\n"
                     "action go { owner: controller; guard: c2 == 1; }\n"
                     "ssa p: p;\ninit { }\nprogram: go;\nspec_bad: F p;\n";
  try {
    dsl::parse_spec(text, "bad.tgs");
    FAIL("expected a diagnostic");
  } catch (const Diagnostic& d) {
    CHECK(d.where().file == "bad.tgs");
    CHECK(d.where().line == 4);
    CHECK(std::string(d.what()).find("undeclared clock 'c2'") !=
          std::string::npos);
  }
}

TEST_CASE("rejects malformed inputs with pointed messages", "[dsl]") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      dsl::parse_spec(text, "t.tgs");
      FAIL("expected a diagnostic for: " + needle);
    } catch (const Diagnostic& d) {
      INFO(d.what());
      CHECK(std::string(d.what()).find(needle) != std::string::npos);
    }
  };

  std::string header = "objects { o1: obj; }\nfluents { p(obj); }\nclocks { c; }\n"
                       "action go { owner: controller; }\n";
  std::string footer = "ssa p(o: obj): p(o);\nreset c: false;\ninit { }\n"
                       "program: go;\nspec_bad: F p(o1);\n";

  expect_error(header + "ssa p(o: obj): p(o);\nssa p(o: obj): p(o);\n"
                        "reset c: false;\ninit { }\nprogram: go;\nspec_bad: F p(o1);\n",
               "duplicate successor-state formula");
  expect_error(header + "reset c: false;\ninit { }\nprogram: go;\nspec_bad: F p(o1);\n",
               "missing successor-state formula");
  expect_error(header + "ssa p(o: obj): p(o);\ninit { }\nprogram: go;\nspec_bad: F p(o1);\n",
               "missing reset formula");
  expect_error("objects { o1: obj; }\nfluents { p(obj); }\nclocks { c; }\n"
               "action go { pre: true; }\n" + footer,
               "missing an ownership tag");
  expect_error(header + "ssa p(o: obj): p(o, o1);\nreset c: false;\ninit { }\n"
                        "program: go;\nspec_bad: F p(o1);\n",
               "too many arguments");
  expect_error(header + footer + "spec_bad: F p(o1);\n",
               "duplicate specification");
  expect_error("objects { o1: obj; }\nfluents { p(obj); }\nclocks { c; }\n"
               "action go { owner: controller; pre: q(o1); }\n" + footer,
               "undeclared fluent 'q'");
  expect_error(header + "ssa p(o: obj): p(o);\nreset c: false;\ninit { p(x); }\n"
                        "program: go;\nspec_bad: F p(o1);\n",
               "undeclared object 'x'");
  expect_error(header + "ssa p(o: obj): p(o);\nreset c: false;\ninit { !p(o1); }\n"
                        "program: go;\nspec_bad: F p(o1);\n",
               "positive atoms only");
  expect_error(header + "ssa p(o: obj): p(o);\nreset c: false;\ninit { }\n"
                        "program: go;\nspec_bad: p(o1) U[2,1] p(o1);\n",
               "inverted interval");
  expect_error(header + "ssa p(o: obj): p(o);\nreset c: false;\ninit { }\n"
                        "program: go;\nspec_bad: p(o1) U[1,inf] p(o1);\n",
               "right-open");
  expect_error("objects { o1: obj; }\nfluents { p(obj); }\nclocks { c; }\n"
               "action go { owner: controller; guard: [c <= 1]; }\n" + footer,
               "always-box");
  expect_error("objects { o1: obj; }\nfluents { p(obj); }\nclocks { c; }\n"
               "action go { owner: controller; guard: c <= -1; }\n" + footer,
               "negative clock bound");
  expect_error("objects { o1: obj; }\nfluents { true; }\n" + footer,
               "reserved word");
  expect_error("objects { o1: obj; }\nfluents { p(obj); }\nclocks { c; }\n"
               "action go { owner: controller; pre: p(o1) = true; }\n" + footer,
               "single '='");
  expect_error(header + "ssa p(o: obj): p(o);\nreset c: false;\ninit { }\n"
                        "spec_bad: F p(o1);\n",
               "missing program");
  expect_error(header + "ssa p(o: obj): p(o);\nreset c: false;\ninit { }\n"
                        "program: go;\n",
               "missing spec_bad");
  expect_error(header + "ssa p(o: obj): a == go | p(o);\nreset c: false;\ninit { }\n"
                        "program: go;\nspec_bad: a == go;\n",
               "reserved word");
}

TEST_CASE("action equalities only in successor-state and reset formulas",
          "[dsl]") {
  std::string text = "objects { }\nfluents { p; }\nclocks { }\n"
                     "action go { owner: controller; pre: a == go; }\n"
                     "ssa p: p;\ninit { }\nprogram: go;\nspec_bad: F p;\n";
  try {
    dsl::parse_spec(text, "t.tgs");
    FAIL("expected a diagnostic");
  } catch (const Diagnostic& d) {
    CHECK(std::string(d.what()).find("only allowed in successor-state") !=
          std::string::npos);
  }
}

TEST_CASE("trace files parse into timed action terms", "[dsl]") {
  std::string text = "0: start_cam\n// boot finishes\n1: end_cam\n"
                     "1.5: start_grasp(o1, l1)\n3/2: end_grasp(o1,l1)\n";
  auto steps = dsl::parse_trace(text, "t.trace");
  REQUIRE(steps.size() == 4);
  CHECK(steps[0].time == Rational(0));
  CHECK(steps[0].action.name == "start_cam");
  CHECK(steps[2].time == Rational(3, 2));
  REQUIRE(steps[2].action.args.size() == 2);
  CHECK(steps[2].action.args[0].name == "o1");
  CHECK(steps[3].time == Rational(3, 2));

  CHECK_THROWS_AS(dsl::parse_trace("1: a\n0: b\n"), Diagnostic);
  CHECK_THROWS_AS(dsl::parse_trace("x: a\n"), Diagnostic);
  CHECK_THROWS_AS(dsl::parse_trace("oops\n"), Diagnostic);
}

#include <fstream>

#include "doctest.h"
#include "scenario.hpp"

using namespace kcell;
using namespace kcell::cli;

namespace {

json base(const std::string& task) { return {{"schema", kScenarioSchema}, {"task", task}}; }

json load(const std::string& name) {
  std::ifstream in(std::string(KCELL_SCENARIO_DIR) + "/" + name);
  return json::parse(in);
}

json without_timing(json r) {
  r.erase("timing_ms");
  return r;
}

}  // namespace

TEST_CASE("coefficient and group specs") {
  CHECK(parse_ring("Z") == Ring::integers());
  CHECK(parse_ring("Fp:3") == Ring::prime_field(3));
  CHECK(parse_ring("Zmod:5") == Ring::prime_field(5));
  CHECK_THROWS_AS(parse_ring("Zmod:6"), Error);
  CHECK_THROWS_AS(parse_ring("Fp:x"), Error);
  CHECK_THROWS_AS(parse_ring("Q"), Error);

  CHECK(parse_group("cyclic:6")->order() == 6);
  CHECK(parse_group("product:2,2")->order() == 4);
  CHECK(parse_group("sigma3")->order() == 6);
  CHECK(!parse_group("sigma3")->is_abelian());
  CHECK(parse_group("dihedral:4")->order() == 8);
  CHECK(parse_group("quaternion")->order() == 8);
  CHECK(parse_group(json{{"product", {"cyclic:2", "cyclic:3"}}})->order() == 6);
  CHECK(parse_group(json{{"table", {{0, 1}, {1, 0}}}})->order() == 2);
  CHECK_THROWS_AS(parse_group(json{{"table", {{0, 1}, {0, 1}}}}), Error);
  CHECK_THROWS_AS(parse_group("cyclic"), Error);
  CHECK_THROWS_AS(parse_group("torus:3"), Error);
}

TEST_CASE("module specs") {
  auto c6 = parse_group("cyclic:6");
  const Ring f2 = Ring::prime_field(2);
  CHECK(parse_module("trivial:3", c6, f2).rank() == 3);
  CHECK(parse_module("free:2", c6, f2).rank() == 12);
  GModule q = parse_module("regular-of-subgroup:3", c6, f2);
  CHECK(q.rank() == 3);
  CHECK(q.action(3).is_identity());
  CHECK(!q.action(1).is_identity());
  CHECK_THROWS_AS(parse_module("regular-of-subgroup:4", c6, f2), Error);

  auto c2 = parse_group("cyclic:2");
  GModule z3 = parse_module("zmod:3:sign", c2, Ring::integers());
  CHECK(z3.underlying().to_string() == "Z/3");
  CHECK(z3.same_elements(z3.action(1), Matrix(Ring::integers(), {{-1}})));

  json explicit_module = {{"rank", 2}, {"generators", {1}}, {"action", {{{0, 1}, {1, 0}}}}};
  GModule perm = parse_module(explicit_module, c2, f2);
  CHECK(perm.rank() == 2);
  json bad_action = {{"rank", 2}, {"generators", {1}}, {"action", {{{1, 1}, {0, 1}}}}};
  CHECK_THROWS_AS(parse_module(bad_action, c2, Ring::integers()), Error);
  json extra = {{"rank", 1}, {"action", {{{1}}}}, {"colour", "red"}};
  CHECK_THROWS_AS(parse_module(extra, c2, f2), Error);

  json points = {{"permutation", {{"points", 3}, {"generators", {1}}, {"perms", {{1, 2, 0}}}}}};
  GModule p3 = parse_module(points, parse_group("cyclic:3"), f2);
  CHECK(p3.rank() == 3);
  CHECK(p3.action(2) == p3.action(1) * p3.action(1));
  json sum = {{"sum", {"trivial", "sign"}}};
  CHECK(parse_module(sum, c2, Ring::integers()).rank() == 2);
}

TEST_CASE("complex and space specs") {
  auto c2 = parse_group("cyclic:2");
  json cx = {{"lo", -1}, {"modules", {"sign", json{{"sum", {"trivial", "sign"}}}}}, {"differentials", {{{0, 3}}}}};
  GComplex x = parse_complex(cx, c2, Ring::integers());
  CHECK(x.lo() == -1);
  CHECK(x.homology(0).to_string() == "Z");
  CHECK(x.homology(-1).to_string() == "Z/3");
  json not_complex = {{"lo", 0}, {"modules", {"trivial", "trivial", "trivial"}}, {"differentials", {{{1}}, {{1}}}}};
  CHECK_THROWS_AS(parse_complex(not_complex, c2, Ring::integers()), Error);
  json short_list = {{"lo", 0}, {"modules", {"trivial", "trivial"}}, {"differentials", json::array()}};
  CHECK_THROWS_AS(parse_complex(short_list, c2, Ring::integers()), Error);

  CHECK(parse_space("cross-polytope:2", nullptr).count(0) == 6);
  CHECK_THROWS_AS(parse_space("cross-polytope:2", parse_group("cyclic:3")), Error);
  json three = {{"discrete", {{"points", 3}, {"generators", {1}}, {"perms", {{1, 2, 0}}}}}};
  GSimplicialComplex s = parse_space(three, parse_group("cyclic:6"));
  CHECK(s.count(0) == 3);
  CHECK(s.perm(3) == std::vector<int>{0, 1, 2});
  json wrong = {{"discrete", {{"points", 3}, {"generators", {1}}, {"perms", {{1, 0, 2}}}}}};
  CHECK_THROWS_AS(parse_space(wrong, parse_group("cyclic:3")), Error);
}

TEST_CASE("exit codes") {
  json sc = base("homology");
  sc["group"] = "cyclic:2";
  sc["coefficients"] = "Z";
  sc["module"] = "trivial";
  CHECK(run_scenario(sc).exit_code == kOk);

  json unknown = sc;
  unknown["colour"] = "red";
  Outcome u = run_scenario(unknown);
  CHECK(u.exit_code == kInputError);
  CHECK(u.report["status"] == "input-error");

  json no_schema = sc;
  no_schema.erase("schema");
  CHECK(run_scenario(no_schema).exit_code == kInputError);

  json bad_task = sc;
  bad_task["task"] = "integrate";
  CHECK(run_scenario(bad_task).exit_code == kInputError);

  json missing = base("cell");
  missing["group"] = "cyclic:2";
  missing["coefficients"] = "Fp:2";
  CHECK(run_scenario(missing).exit_code == kInputError);

  json wrong = sc;
  wrong["expect"] = {{"homology", {{"0", "Z/2"}}}};
  Outcome w = run_scenario(wrong);
  CHECK(w.exit_code == kMismatch);
  CHECK(w.report["expectations"]["mismatches"].size() == 1);

  json koszul_z = base("koszul");
  koszul_z["group"] = "cyclic:2";
  koszul_z["coefficients"] = "Z";
  CHECK(run_scenario(koszul_z).exit_code == kNoStrategy);

  json sigma = base("cell");
  sigma["group"] = "sigma3";
  sigma["coefficients"] = "Z";
  sigma["module"] = "zmod:3:sign";
  Outcome s = run_scenario(sigma);
  CHECK(s.exit_code == kNoStrategy);
  CHECK(s.report["error"]["witness"].get<std::string>().find("not a nilpotent") != std::string::npos);

  Outcome o = run_file(std::string(KCELL_SCENARIO_DIR) + "/malformed.json");
  CHECK(o.exit_code == kInputError);
}

TEST_CASE("overrides") {
  json sc = load("cell-c6-regular-of-subgroup.json");
  Overrides o;
  o.strategy = "cyclic";
  o.range = CellRange{-2, 2};
  Outcome r = run_scenario(sc, o);
  CHECK(r.report["strategy"] == "cyclic");
  CHECK(r.report["results"]["strategy"] == "cyclic");
  CHECK(r.report["range"]["a"] == -2);
  CHECK(r.exit_code == kMismatch);  // the expectation names the nilpotent strategy
  CHECK_THROWS_AS(parse_range("3:1"), Error);
  CHECK_THROWS_AS(parse_range("1"), Error);
  CHECK(parse_range("-5:5").a == -5);
}

TEST_CASE("reports are deterministic given the seed") {
  json sc = load("ac03-p-group-suite.json");
  sc["trials"] = 6;
  sc.erase("expect");
  const json a = without_timing(run_scenario(sc).report);
  const json b = without_timing(run_scenario(sc).report);
  CHECK(a.dump() == b.dump());
  Overrides o;
  o.seed = 99;
  const json c = without_timing(run_scenario(sc, o).report);
  CHECK(c["seed"] == 99);
  CHECK(c["results"]["accepted"] == 6);
}

TEST_CASE("expectations and tsv") {
  json actual = {{"a", 1}, {"b", {{"c", {1, 2}}, {"d", "x"}}}};
  CHECK(expectation_mismatches(json{{"b", {{"d", "x"}}}}, actual).empty());
  CHECK(expectation_mismatches(json{{"b", {{"c", {1}}}}}, actual).size() == 1);
  CHECK(expectation_mismatches(json{{"e", 1}}, actual).size() == 1);
  CHECK(to_tsv(actual) == "a\t1\nb.c.0\t1\nb.c.1\t2\nb.d\tx\n");
}

TEST_CASE("builtin catalog") {
  bool ok = false;
  json cat = builtin_catalog(&ok);
  CHECK(ok);
  const std::string dump = cat.dump();
  CHECK(dump.find("\"sigma3\"") != std::string::npos);
  CHECK(dump.find("\"cross-polytope:n\"") != std::string::npos);
  for (const auto& p : cat["presentations"]) CHECK(p["validated"] == true);
  CHECK(cat["tasks"].size() == task_names().size());
}

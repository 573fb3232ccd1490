#include <doctest.h>

#include <algorithm>
#include <random>

#include "svbench/task_model.hpp"
#include "test_support.hpp"

using namespace svbench::task;
using namespace svbench::testing;

namespace {

TaskErrc parse_error(const std::string& text, const fs::path& base, const ParseOptions& opts = {}) {
  try {
    parse_task_definition(text, base, opts);
  } catch (const TaskError& e) {
    return e.kind();
  }
  FAIL("expected a TaskError");
  return TaskErrc::MalformedTask;
}

std::vector<Rule> rules(const std::vector<Violation>& vs) {
  std::vector<Rule> out;
  for (const auto& v : vs) out.push_back(v.rule);
  return out;
}

/// A task tree with `Main.java`, a shared Verifier and one property file.
struct Corpus {
  TempDir dir;
  Corpus() {
    write_file(dir / "tasks/t1/Main.java", kLicensedMain);
    write_file(dir / "common/org/sosy_lab/sv_benchmarks/Verifier.java",
               "package org.sosy_lab.sv_benchmarks;\nimport java.util.Random;\n"
               "public final class Verifier { static Random r = new Random(); }\n");
    write_file(dir / "properties/assert.prp", kAssertProperty);
    write_file(dir / "properties/other.prp", kAssertProperty);
  }
  fs::path base() const { return dir / "tasks"; }
};

}  // namespace

TEST_CASE("two input files and one property") {
  Corpus c;
  const TaskDefinition t = parse_task_definition(
      "format_version: '2.0'\n"
      "format_version: '2.0'\ninput_files: [t1/Main.java, ../common/org/sosy_lab/sv_benchmarks/Verifier.java]\n"
      "properties:\n  - property_file: ../properties/assert.prp\n    expected_verdict: true\n",
      c.base(), {"t1", c.dir.path()});
  CHECK(t.name == "t1");
  CHECK(t.format_version == "2.0");
  REQUIRE(t.input_files.size() == 2);
  CHECK(t.input_files[0] == fs::path("t1/Main.java"));
  CHECK(t.input_files[1] == fs::path("../common/org/sosy_lab/sv_benchmarks/Verifier.java"));
  REQUIRE(t.properties.size() == 1);
  CHECK(t.properties[0].holds);
  CHECK(t.properties[0].property_file == fs::path("../properties/assert.prp"));
  CHECK(t.resolve(t.properties[0].property_file) == (c.dir / "properties/assert.prp").lexically_normal());
}

TEST_CASE("a task may pair several property files with different verdicts") {
  Corpus c;
  const TaskDefinition t = parse_task_definition(
      "format_version: '2.0'\ninput_files: t1/\nproperties:\n"
      "  - {property_file: ../properties/assert.prp, expected_verdict: true}\n"
      "  - {property_file: ../properties/other.prp, expected_verdict: false}\n",
      c.base());
  REQUIRE(t.properties.size() == 2);
  CHECK(t.properties[0].holds);
  CHECK_FALSE(t.properties[1].holds);
}

TEST_CASE("structural errors") {
  Corpus c;
  const std::string prop = "properties:\n  - property_file: ../properties/assert.prp\n    expected_verdict: true\n";
  CHECK(parse_error("format_version: '2.0'\ninput_files: []\n" + prop, c.base()) == TaskErrc::MalformedTask);
  CHECK(parse_error("format_version: '2.0'\n" + prop, c.base()) == TaskErrc::MalformedTask);
  CHECK(parse_error("format_version: '2.0'\ninput_files: [t1/]\nproperties: []\n", c.base()) == TaskErrc::MalformedTask);
  CHECK(parse_error("format_version: '2.0'\ninput_files: [t1/]\nproperties:\n  - property_file: ../properties/assert.prp\n"
                    "    expected_verdict: perhaps\n",
                    c.base()) == TaskErrc::MalformedTask);
  CHECK(parse_error("format_version: '2.0'\ninput_files: {a: b}\n" + prop, c.base()) == TaskErrc::MalformedTask);
  CHECK(parse_error("[not, a, mapping]\n", c.base()) == TaskErrc::MalformedTask);
  CHECK(parse_error("input_files: [t1/]\n" + prop, c.base()) == TaskErrc::MalformedTask);
  CHECK(parse_error("format_version: '2.0'\ninput_files: [t1/\n", c.base()) == TaskErrc::MalformedTask);
}

TEST_CASE("the same property file twice is a duplicate") {
  Corpus c;
  CHECK(parse_error("format_version: '2.0'\ninput_files: [t1/]\nproperties:\n"
                    "  - {property_file: ../properties/assert.prp, expected_verdict: true}\n"
                    "  - {property_file: ../properties/./assert.prp, expected_verdict: false}\n",
                    c.base()) == TaskErrc::DuplicateProperty);
}

TEST_CASE("referenced files must exist") {
  Corpus c;
  CHECK(parse_error("format_version: '2.0'\ninput_files: [t1/Nope.java]\nproperties:\n"
                    "  - {property_file: ../properties/assert.prp, expected_verdict: true}\n",
                    c.base()) == TaskErrc::MissingInputFile);
  CHECK(parse_error("format_version: '2.0'\ninput_files: [t1/]\nproperties:\n"
                    "  - {property_file: ../properties/missing.prp, expected_verdict: true}\n",
                    c.base()) == TaskErrc::MissingInputFile);
}

TEST_CASE("paths may not escape the collection root") {
  Corpus c;
  write_file(c.dir.path().parent_path() / (c.dir.path().filename().string() + "-outside.java"), "class X {}");
  const std::string outside = "../../" + c.dir.path().filename().string() + "-outside.java";
  ParseOptions opts{"t", c.dir.path()};
  CHECK(parse_error("format_version: '2.0'\ninput_files: [" + outside + "]\nproperties:\n"
                    "  - {property_file: ../properties/assert.prp, expected_verdict: true}\n",
                    c.base(), opts) == TaskErrc::PathEscapesRoot);
  fs::remove(c.dir.path().parent_path() / (c.dir.path().filename().string() + "-outside.java"));
}

TEST_CASE("directory inputs expand recursively and without duplicates") {
  Corpus c;
  const TaskDefinition t = parse_task_definition(
      "format_version: '2.0'\ninput_files: [t1/, t1/Main.java, ../common/]\nproperties:\n"
      "  - {property_file: ../properties/assert.prp, expected_verdict: true}\n",
      c.base());
  const auto java = expand_java_sources(t);
  REQUIRE(java.size() == 2);
  CHECK(std::is_sorted(java.begin(), java.end()));
  CHECK(std::count(java.begin(), java.end(), (c.base() / "t1/Main.java").lexically_normal()) == 1);
}

TEST_CASE("fixture corpus files load") {
  const TaskDefinition t = load_task_file(kFixtures / "collection/campaign/safe01.yml", kFixtures / "collection");
  CHECK(t.name == "safe01");
  CHECK(t.input_files.size() == 2);
  CHECK(t.properties.size() == 1);
  CHECK(validate_task(t).empty());
}

TEST_CASE("validation examples") {
  const fs::path bad = kFixtures / "bad-collection";
  CHECK(rules(validate_task(load_task_file(bad / "tasks/jar-dep.yml", bad))) ==
        std::vector<Rule>{Rule::ForbiddenBinaryDependency});
  CHECK(rules(validate_task(load_task_file(bad / "tasks/no-main.yml", bad))) ==
        std::vector<Rule>{Rule::MissingEntryPoint});

  Corpus c;
  const TaskDefinition clean = parse_task_definition(
      "format_version: '2.0'\ninput_files: [t1/]\nproperties:\n  - {property_file: ../properties/assert.prp, expected_verdict: true}\n",
      c.base());
  CHECK(validate_task(clean).empty());
}

TEST_CASE("entry point detection is textual and strict about the root package") {
  Corpus c;
  const std::string header = "// Copyright 2026 someone\n";
  auto check_src = [&](const std::string& src) {
    write_file(c.dir / "tasks/t2/Main.java", src);
    const TaskDefinition t = parse_task_definition(
        "format_version: '2.0'\ninput_files: [t2/]\nproperties:\n  - {property_file: ../properties/assert.prp, expected_verdict: true}\n",
        c.base());
    return rules(validate_task(t));
  };
  CHECK(check_src(header + "class Main { public static void main(String[] a) {} }").empty());
  CHECK(check_src(header + "class Main { static public void main(final String... a) {} }").empty());
  CHECK(check_src(header + "package foo;\nclass Main { public static void main(String[] a) {} }") ==
        std::vector<Rule>{Rule::MissingEntryPoint});
  CHECK(check_src(header + "class Main { /* public static void main(String[] a) */ }") ==
        std::vector<Rule>{Rule::MissingEntryPoint});
  CHECK(check_src(header + "class Other { public static void main(String[] a) {} }") ==
        std::vector<Rule>{Rule::MissingEntryPoint});
  CHECK(check_src("class Main { public static void main(String[] a) {} }") ==
        std::vector<Rule>{Rule::MissingLicenseHeader});
  CHECK(check_src("/* just a note */\nclass Main { public static void main(String[] a) {} }") ==
        std::vector<Rule>{Rule::MissingLicenseHeader});
}

TEST_CASE("Random outside the Verifier package is a warning") {
  Corpus c;
  write_file(c.dir / "tasks/t3/Main.java",
             std::string(kLicensedMain) + "class Helper { java.util.Random r = new java.util.Random(); }\n");
  write_file(c.dir / "tasks/t3/Quiet.java", "class Quiet { String s = \"Random\"; // Random\n }\n");
  const TaskDefinition t = parse_task_definition(
      "format_version: '2.0'\ninput_files: [t3/, ../common/]\nproperties:\n"
      "  - {property_file: ../properties/assert.prp, expected_verdict: true}\n",
      c.base());
  const auto vs = validate_task(t);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].rule == Rule::NondeterminismOutsideVerifier);
  CHECK(vs[0].severity == Severity::Warning);
  CHECK(vs[0].location.filename() == "Main.java");
}

TEST_CASE("task model: validation is pure") {
  const fs::path bad = kFixtures / "bad-collection";
  std::vector<TaskDefinition> tasks = {
      load_task_file(bad / "tasks/jar-dep.yml", bad),
      load_task_file(bad / "tasks/no-main.yml", bad),
      load_task_file(kFixtures / "collection/campaign/unsafe01.yml", kFixtures / "collection"),
  };
  std::vector<std::vector<Violation>> reference;
  for (const auto& t : tasks) reference.push_back(validate_task(t));
  std::mt19937_64 rng(3);
  std::vector<std::size_t> order = {0, 1, 2};
  for (int i = 0; i < 30; ++i) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) CHECK(validate_task(tasks[idx]) == reference[idx]);
  }
}

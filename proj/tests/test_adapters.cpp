#include <doctest.h>

#include <algorithm>
#include <random>

#include "svbench/adapters.hpp"
#include "svbench/benchmark.hpp"
#include "test_support.hpp"

using namespace svbench;
using namespace svbench::adapters;
using namespace svbench::testing;
using exec::TerminationKind;
using exec::TerminationReason;

namespace doctest {
template <>
struct StringMaker<std::vector<std::string>> {
  static String convert(const std::vector<std::string>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return (s + "]").c_str();
  }
};
}  // namespace doctest

namespace {

const std::string kTwoFileTask = "format_version: '2.0'\ninput_files: [A.java, B.java]\n"
                                 "properties:\n  - {property_file: assert.prp, expected_verdict: true}\n";

ToolAdapter simple_adapter(std::vector<std::string> tmpl) {
  ToolAdapter a;
  a.tool_name = "tool";
  a.executable = "tool";
  a.cmdline_template = std::move(tmpl);
  a.answer_rules = {AnswerRule(AnswerRule::Kind::Pattern, "UNSAFE", Verdict::False),
                    AnswerRule(AnswerRule::Kind::Pattern, "SAFE", Verdict::True)};
  return a;
}

AdapterErrc adapter_error(auto&& fn) {
  try {
    fn();
  } catch (const AdapterError& e) {
    return e.kind();
  }
  FAIL("expected an AdapterError");
  return AdapterErrc::MalformedAdapter;
}

/// Collection with `count` one-property tasks under `dir/` plus a shared Verifier.
void make_collection(const TempDir& root, const std::string& dir, int count, int properties = 1) {
  write_file(root / "common/org/sosy_lab/sv_benchmarks/Verifier.java", "package org.sosy_lab.sv_benchmarks;\n");
  write_file(root / "properties/assert.prp", kAssertProperty);
  write_file(root / "properties/second.prp", std::string("  ") + kAssertProperty);
  for (int i = 0; i < count; ++i) {
    const std::string name = "t" + std::to_string(i);
    write_file(root / dir / name / "Main.java", kLicensedMain);
    std::string yml = "format_version: '2.0'\ninput_files: ['../common/', '" + name + "/']\nproperties:\n"
                      "  - {property_file: ../properties/assert.prp, expected_verdict: true}\n";
    if (properties > 1) yml += "  - {property_file: ../properties/second.prp, expected_verdict: false}\n";
    write_file(root / dir / (name + ".yml"), yml);
  }
}

const AdapterRegistry& test_registry() {
  static const AdapterRegistry reg = AdapterRegistry::load_dir(kTestAdapters);
  return reg;
}

}  // namespace

TEST_CASE("direct substitution") {
  TempDir dir;
  write_file(dir / "A.java", "class A {}");
  write_file(dir / "B.java", "class B {}");
  write_file(dir / "assert.prp", kAssertProperty);
  const auto task = task::parse_task_definition(kTwoFileTask, dir.path());
  const auto argv = build_cmdline(simple_adapter({"--propertyfile", "{PROPERTY_FILE}", "{INPUT_FILES}"}), task,
                                  dir / "assert.prp", {}, dir.path());
  CHECK(argv == std::vector<std::string>{"tool", "--propertyfile", "assert.prp", "A.java", "B.java"});
}

TEST_CASE("options, embedded property file and directories") {
  TempDir dir;
  make_collection(dir, "tasks", 1);
  const auto task = task::load_task_file(dir / "tasks/t0.yml", dir.path());
  const auto argv = build_cmdline(simple_adapter({"{OPTIONS}", "--prop={PROPERTY_FILE}", "-cp", "{INPUT_DIRS}"}),
                                  task, dir / "properties/assert.prp", {"--fast", "--depth=3"}, dir.path());
  CHECK(argv == std::vector<std::string>{"tool", "--fast", "--depth=3", "--prop=properties/assert.prp", "-cp",
                                         "common/", "tasks/t0/"});
}

TEST_CASE("a source in a listed directory appears once") {
  TempDir dir;
  make_collection(dir, "tasks", 1);
  write_file(dir / "tasks/t0.yml", "format_version: '2.0'\ninput_files: ['../common/', 't0/', 't0/Main.java']\n"
                                   "properties:\n  - {property_file: ../properties/assert.prp, expected_verdict: true}\n");
  const auto task = task::load_task_file(dir / "tasks/t0.yml", dir.path());
  const auto argv = build_cmdline(simple_adapter({"{INPUT_FILES}"}), task, dir / "properties/assert.prp", {},
                                  dir.path());
  CHECK(argv == std::vector<std::string>{"tool", "common/org/sosy_lab/sv_benchmarks/Verifier.java",
                                         "tasks/t0/Main.java"});
}

TEST_CASE("template errors") {
  TempDir dir;
  write_file(dir / "A.java", "class A {}");
  write_file(dir / "B.java", "class B {}");
  write_file(dir / "assert.prp", kAssertProperty);
  write_file(dir / "notes.txt", "x");
  const auto task = task::parse_task_definition(kTwoFileTask, dir.path());
  auto build = [&](std::vector<std::string> tmpl, const task::TaskDefinition& t) {
    return [&, tmpl, t] { build_cmdline(simple_adapter(tmpl), t, dir / "assert.prp", {}, dir.path()); };
  };
  CHECK(adapter_error(build({"{SOURCEPATH}"}, task)) == AdapterErrc::UnknownPlaceholder);
  CHECK(adapter_error(build({"--in={INPUT_FILES}"}, task)) == AdapterErrc::UnknownPlaceholder);
  CHECK(adapter_error(build({"{PROPERTY_FILE"}, task)) == AdapterErrc::UnknownPlaceholder);

  const auto no_java = task::parse_task_definition(
      "format_version: '2.0'\ninput_files: [notes.txt]\nproperties:\n"
      "  - {property_file: assert.prp, expected_verdict: true}\n",
      dir.path());
  CHECK(adapter_error(build({"{INPUT_FILES}"}, no_java)) == AdapterErrc::EmptyExpansion);
}

TEST_CASE("adapters: command lines stay inside the collection root") {
  TempDir outer;
  make_collection(outer, "tasks", 3);
  const fs::path root = outer / "tasks";  // ../common lies outside this root.
  const auto task = task::load_task_file(root / "t1.yml");
  CHECK(adapter_error([&] {
          build_cmdline(simple_adapter({"{INPUT_FILES}"}), task, outer / "properties/assert.prp", {}, root);
        }) == AdapterErrc::PathEscapesRoot);

  std::mt19937_64 rng(5);
  const std::vector<std::string> tokens = {"{INPUT_FILES}", "{INPUT_DIRS}", "{PROPERTY_FILE}", "{OPTIONS}", "-x"};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> tmpl;
    for (int n = 1 + static_cast<int>(rng() % 5); n > 0; --n) tmpl.push_back(tokens[rng() % tokens.size()]);
    const auto t = task::load_task_file(outer / "tasks" / ("t" + std::to_string(rng() % 3) + ".yml"), outer.path());
    const auto argv = build_cmdline(simple_adapter(tmpl), t, outer / "properties/assert.prp", {"-o"}, outer.path());
    for (std::size_t k = 1; k < argv.size(); ++k) {
      if (argv[k] == "-x" || argv[k] == "-o") continue;
      const fs::path p(argv[k]);
      CHECK(p.is_relative());
      CHECK(*p.begin() != "..");
      CHECK(fs::exists(outer / p));
    }
    CHECK(build_cmdline(simple_adapter(tmpl), t, outer / "properties/assert.prp", {"-o"}, outer.path()) == argv);
  }
}

TEST_CASE("answer precedence over every reason and marker") {
  const ToolAdapter a = simple_adapter({});
  const std::vector<std::pair<std::string, Verdict>> outputs = {
      {"analysis done\nSAFE\n", Verdict::True}, {"UNSAFE\ntrace follows\n", Verdict::False}, {"", Verdict::Unknown}};
  const std::vector<std::pair<TerminationKind, std::string>> reasons = {
      {TerminationKind::Normal, ""},
      {TerminationKind::CpuTimeout, "timeout"},
      {TerminationKind::WallTimeout, "timeout"},
      {TerminationKind::OutOfMemory, "out of memory"},
      {TerminationKind::Signaled, "crash"},
      {TerminationKind::HarnessError, "crash"},
  };
  int cases = 0;
  for (const auto& [kind, status] : reasons) {
    for (const auto& [output, marker] : outputs) {
      CAPTURE(output);
      CAPTURE(status);
      const Answer ans = determine_answer(a, 0, output, TerminationReason{kind, ""});
      if (kind != TerminationKind::Normal) {
        CHECK(ans == Answer{Verdict::Unknown, status});
      } else if (marker == Verdict::True) {
        CHECK(ans == Answer{Verdict::True, "true"});
      } else if (marker == Verdict::False) {
        CHECK(ans == Answer{Verdict::False, "false"});
      } else {
        CHECK(ans == Answer{Verdict::Unknown, "unrecognized output"});
      }
      ++cases;
    }
  }
  CHECK(cases == 18);
  CHECK(determine_answer(a, 137, "", {TerminationKind::Signaled, "killed"}) == Answer{Verdict::Unknown, "crash"});
  CHECK(determine_answer(a, 0, "UNSAFE\n", {TerminationKind::CpuTimeout, ""}) == Answer{Verdict::Unknown, "timeout"});
}

TEST_CASE("first matching rule wins and patterns are whole-line") {
  ToolAdapter a = simple_adapter({});
  CHECK(determine_answer(a, 0, "x\nUNSAFE\nSAFE\n", {}).verdict == Verdict::False);
  CHECK(determine_answer(a, 0, "NOT SAFE AT ALL\n", {}).verdict == Verdict::Unknown);
  a.answer_rules = {AnswerRule(AnswerRule::Kind::Literal, "SAFE", Verdict::True),
                    AnswerRule(AnswerRule::Kind::Literal, "UNSAFE", Verdict::False)};
  // A substring literal shadows the more specific marker when listed first.
  CHECK(determine_answer(a, 0, "UNSAFE\n", {}).verdict == Verdict::True);
  CHECK(determine_answer(a, 0, "UNSAFE", {}).verdict == Verdict::True);
}

TEST_CASE("shipped descriptors parse and their rules do not overlap on sample outputs") {
  const AdapterRegistry reg = AdapterRegistry::load_dir(kSourceDir / "adapters");
  CHECK(reg.names() == std::vector<std::string>{"jayhorn", "jbmc", "jpf", "mockver", "spf"});
  const std::map<std::string, std::pair<std::string, std::string>> samples = {
      {"jbmc", {"Generating GOTO Program\nVERIFICATION SUCCESSFUL\n", "Generating GOTO Program\nVERIFICATION FAILED\n"}},
      {"jpf", {"====== results\nno errors detected\n", "gov.nasa.jpf.vm.NoUncaughtExceptionsProperty\njava.lang.AssertionError\n"}},
      {"spf", {"====== results\nno errors detected\n", "java.lang.AssertionError at Main.main\n"}},
      {"jayhorn", {"Checking...\nSAFE\n", "Checking...\nUNSAFE\n"}},
      {"mockver", {"SAFE\n", "UNSAFE\n"}},
  };
  for (const auto& [tool, outs] : samples) {
    CAPTURE(tool);
    const ToolAdapter* a = reg.find(tool);
    REQUIRE(a != nullptr);
    for (const auto& [text, verdict] : {std::pair{outs.first, Verdict::True}, std::pair{outs.second, Verdict::False}}) {
      int matching = 0;
      for (const auto& rule : a->answer_rules) matching += rule.matches(text) ? 1 : 0;
      CHECK(matching == 1);
      CHECK(determine_answer(*a, 0, text, {}).verdict == verdict);
    }
  }
  const ToolAdapter* mock = reg.find("mockver");
  REQUIRE(mock->wrapper_script.has_value());
  CHECK(fs::path(*mock->wrapper_script) == (kSourceDir / "adapters/mock-dispatch.sh").lexically_normal());
  CHECK(reg.find("jbmc")->executable == "jbmc");
  CHECK(reg.find("jbmc")->version_probe == std::vector<std::string>{"jbmc", "--version"});
}

TEST_CASE("malformed descriptors") {
  CHECK(adapter_error([] { parse_adapter("executable: x\ncmdline_template: []\nanswer_rules: []\n"); }) ==
        AdapterErrc::MalformedAdapter);
  CHECK(adapter_error([] {
          parse_adapter("tool_name: t\nexecutable: x\ncmdline_template: []\n"
                        "answer_rules:\n  - {pattern: '(', verdict: TRUE}\n");
        }) == AdapterErrc::MalformedAdapter);
  CHECK(adapter_error([] {
          parse_adapter("tool_name: t\nexecutable: x\ncmdline_template: []\n"
                        "answer_rules:\n  - {literal: 'ok', verdict: UNKNOWN}\n");
        }) == AdapterErrc::MalformedAdapter);
  CHECK(adapter_error([] { AdapterRegistry({simple_adapter({}), simple_adapter({})}); }) ==
        AdapterErrc::MalformedAdapter);
}

TEST_CASE("benchmark definition examples") {
  const auto& reg = test_registry();
  const BenchmarkDefinition d =
      load_benchmark_definition("tool: mockver\nrun_sets:\n  - name: all\n    tasks: ['fixtures/*.yml']\n", reg);
  CHECK(d.tool_name == "mockver");
  REQUIRE(d.run_sets.size() == 1);
  CHECK(d.run_sets[0].task_globs == std::vector<std::string>{"fixtures/*.yml"});
  CHECK_FALSE(d.limits_override.has_value());

  CHECK(adapter_error([&] { load_benchmark_definition("tool: mockver\nrun_sets: []\n", reg); }) ==
        AdapterErrc::MalformedDefinition);

  const BenchmarkDefinition o = load_benchmark_definition(
      "tool: mockver\noptions: [--a]\nlimits: {cpu_time_s: 60}\n"
      "run_sets:\n  - {name: s, tasks: ['*.yml'], options: [--b]}\n",
      reg);
  REQUIRE(o.limits_override.has_value());
  CHECK(o.limits_override->cpu_time_s == 60.0);
  CHECK_FALSE(o.limits_override->wall_time_s.has_value());
  CHECK(o.global_options == std::vector<std::string>{"--a"});
  CHECK(o.run_sets[0].options == std::vector<std::string>{"--b"});

  CHECK(adapter_error([&] { load_benchmark_definition("tool: nosuch\nrun_sets: [{name: s, tasks: ['*.yml']}]\n", reg); }) ==
        AdapterErrc::UnknownTool);
  for (const char* bad : {"run_sets: [{name: s, tasks: ['*.yml']}]\n",
                          "tool: mockver\nrun_sets: [{name: s, tasks: ['../*.yml']}]\n",
                          "tool: mockver\nrun_sets: [{name: s, tasks: ['/abs/*.yml']}]\n",
                          "tool: mockver\nrun_sets: [{name: s, tasks: ['a[b.yml']}]\n",
                          "tool: mockver\nrun_sets: [{name: s, tasks: []}]\n",
                          "tool: mockver\nlimits: {cpu_time_s: 0}\nrun_sets: [{name: s, tasks: ['*.yml']}]\n",
                          "tool: mockver\nlimits: {bogus: 1}\nrun_sets: [{name: s, tasks: ['*.yml']}]\n",
                          "tool: [mockver\n"}) {
    CAPTURE(bad);
    CHECK(adapter_error([&] { load_benchmark_definition(bad, reg); }) == AdapterErrc::MalformedDefinition);
  }
}

TEST_CASE("expansion cardinality and fan-out") {
  const auto& reg = test_registry();
  {
    TempDir root;
    make_collection(root, "tasks", 3);
    const auto defn = load_benchmark_definition("tool: mockver\nrun_sets: [{name: s, tasks: ['tasks/*.yml']}]\n", reg);
    const Expansion e = expand_runs(defn, reg, root.path());
    CHECK(e.runs.size() == 3);
    CHECK(e.skipped.empty());
  }
  {
    TempDir root;
    make_collection(root, "tasks", 1, 2);
    const auto defn = load_benchmark_definition("tool: mockver\nrun_sets: [{name: s, tasks: ['tasks/*.yml']}]\n", reg);
    const Expansion e = expand_runs(defn, reg, root.path());
    REQUIRE(e.runs.size() == 2);
    CHECK(e.runs[0].property == fs::path("properties/assert.prp"));
    CHECK(e.runs[0].expected.holds);
    CHECK(e.runs[1].property == fs::path("properties/second.prp"));
    CHECK_FALSE(e.runs[1].expected.holds);
  }
}

TEST_CASE("overlapping run sets each plan their own runs") {
  const auto& reg = test_registry();
  TempDir root;
  make_collection(root, "tasks", 4);
  const auto defn = load_benchmark_definition(
      "tool: mockver\nrun_sets:\n  - {name: low, tasks: ['tasks/t[01].yml', 'tasks/t2.yml']}\n"
      "  - {name: high, tasks: ['tasks/t[123].yml']}\n",
      reg);
  const Expansion e = expand_runs(defn, reg, root.path());
  std::vector<std::pair<std::string, std::string>> got;
  for (const auto& r : e.runs) got.emplace_back(r.run_set, r.task_id);
  // Manual enumeration over the fixture tree.
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"high", "tasks/t1"}, {"high", "tasks/t2"}, {"high", "tasks/t3"},
      {"low", "tasks/t0"},  {"low", "tasks/t1"},  {"low", "tasks/t2"}};
  CHECK(got == expected);
}

TEST_CASE("runs carry options, limits and a clean environment") {
  const auto& reg = test_registry();
  TempDir root;
  make_collection(root, "tasks", 1);
  const auto defn = load_benchmark_definition(
      "tool: mockver\noptions: [--g]\nlimits: {wall_time_s: 5}\n"
      "run_sets: [{name: s, tasks: ['tasks/*.yml'], options: [--r]}]\n",
      reg);
  exec::ResourceLimits base;
  base.cpu_time_s = 42;
  const Expansion e = expand_runs(defn, reg, root.path(), base);
  REQUIRE(e.runs.size() == 1);
  const auto& spec = e.runs[0].spec;
  CHECK(spec.limits.cpu_time_s == 42.0);
  CHECK(spec.limits.wall_time_s == 5.0);
  CHECK(spec.working_dir == fs::absolute(root.path()).lexically_normal());
  CHECK(spec.environment.count("PATH") == 1);
  CHECK(spec.environment.at("LC_ALL") == "C");
  CHECK(spec.argv == std::vector<std::string>{reg.find("mockver")->wrapper_script.value(), reg.find("mockver")->executable,
                                              "--directives", "mockver.directives", "properties/assert.prp", "common/",
                                              "tasks/t0/"});
}

TEST_CASE("broken tasks and unsupported properties are skipped") {
  const auto& reg = test_registry();
  TempDir root;
  make_collection(root, "tasks", 2);
  write_file(root / "tasks/broken.yml", "format_version: '2.0'\ninput_files: []\n");
  write_file(root / "properties/liveness.prp", "CHECK( init(Main.main()), LTL(F end) )\n");
  write_file(root / "tasks/live.yml", "format_version: '2.0'\ninput_files: ['t0/']\nproperties:\n"
                                      "  - {property_file: ../properties/liveness.prp, expected_verdict: true}\n");
  const auto defn = load_benchmark_definition("tool: mockver\nrun_sets: [{name: s, tasks: ['tasks/*.yml']}]\n", reg);
  const Expansion e = expand_runs(defn, reg, root.path());
  CHECK(e.runs.size() == 2);
  REQUIRE(e.skipped.size() == 2);
  CHECK(e.skipped[0].task_file == fs::path("tasks/broken.yml"));
  CHECK(e.skipped[1].task_file == fs::path("tasks/live.yml"));
}

TEST_CASE("adapters: expansion order does not depend on creation order") {
  const auto& reg = test_registry();
  const auto defn = load_benchmark_definition(
      "tool: mockver\nrun_sets:\n  - {name: b, tasks: ['x/*.yml']}\n  - {name: a, tasks: ['*/*.yml']}\n", reg);
  std::mt19937_64 rng(17);
  std::vector<std::pair<std::string, std::string>> reference;
  for (int iter = 0; iter < 5; ++iter) {
    TempDir root;
    write_file(root / "properties/assert.prp", kAssertProperty);
    std::vector<std::string> names = {"x/n3", "x/n1", "y/n2", "x/n10", "y/n0", "x/a"};
    std::shuffle(names.begin(), names.end(), rng);
    for (const auto& n : names) {
      write_file(root / (n + "/Main.java"), kLicensedMain);
      write_file(root / (n + ".yml"), "format_version: '2.0'\ninput_files: ['" + fs::path(n).filename().string() +
                                          "/']\nproperties:\n"
                                          "  - {property_file: ../properties/assert.prp, expected_verdict: true}\n");
    }
    std::vector<std::pair<std::string, std::string>> got;
    for (const auto& r : expand_runs(defn, reg, root.path()).runs) got.emplace_back(r.run_set, r.task_id);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(got.size() == 10);
    if (iter == 0) reference = got;
    CHECK(got == reference);
  }
}

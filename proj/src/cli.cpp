#include "svbench/cli.hpp"

#include <sys/utsname.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "svbench/property.hpp"
#include "svbench/reporting.hpp"
#include "svbench/results_io.hpp"
#include "svbench/scoring.hpp"
#include "svbench/task_model.hpp"

namespace svbench::cli {
namespace {

std::string paint(const Console& c, std::string_view text, const char* ansi) {
  if (!c.color) return std::string(text);
  return std::string("\033[") + ansi + "m" + std::string(text) + "\033[0m";
}

std::optional<std::string> read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp-" + std::to_string(getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> task_files(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".yml") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct StampValue {
  std::string iso;
  std::string compact;
};

StampValue make_stamp(Stamp stamp) {
  std::time_t t = stamp == Stamp::Fixed ? 0 : std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char iso[32], compact[32];
  std::strftime(iso, sizeof iso, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::strftime(compact, sizeof compact, "%Y%m%dT%H%M%SZ", &tm);
  return {iso, compact};
}

std::string host_fingerprint() {
  utsname u{};
  uname(&u);
  return std::string(u.nodename) + " " + u.sysname + " " + u.release + " " + u.machine + " " +
         std::to_string(exec::available_cpus().size()) + " cpus";
}

std::string probe_version(const adapters::ToolAdapter& adapter, const fs::path& root) {
  if (!adapter.version_probe || adapter.version_probe->empty()) return {};
  exec::RunSpec spec;
  spec.argv = *adapter.version_probe;
  spec.working_dir = root;
  spec.environment = {{"PATH", "/usr/local/sbin:/usr/local/bin:/usr/sbin:/usr/bin:/sbin:/bin"}};
  spec.limits.cpu_time_s = 10;
  spec.limits.wall_time_s = 10;
  spec.output_cap_bytes = 4096;
  exec::ExecOptions options;
  options.accounting = exec::AccountingMode::Sampling;
  auto r = exec::execute_run(spec, options);
  if (r.reason.kind != exec::TerminationKind::Normal) return {};
  std::string line = r.output.substr(0, r.output.find('\n'));
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  return line;
}

std::optional<std::vector<report::ResultSet>> load_all(const std::vector<fs::path>& files, Console& console) {
  if (files.empty()) {
    console.err << "error: at least one results file is required\n";
    return std::nullopt;
  }
  std::vector<report::ResultSet> sets;
  for (const auto& f : files) {
    try {
      sets.push_back(report::load_results(f));
    } catch (const report::ResultsError& e) {
      console.err << "error: " << f.string() << ": " << e.what() << "\n";
      return std::nullopt;
    }
  }
  return sets;
}

}  // namespace

int cmd_validate(const fs::path& root, Console& console) {
  if (!fs::is_directory(root)) {
    console.err << "error: collection root not found: " << root.string() << "\n";
    return kFailure;
  }
  std::size_t tasks = 0, errors = 0, warnings = 0;
  const std::string error_tag = paint(console, "error", "31");
  const std::string warning_tag = paint(console, "warning", "33");
  try {
    for (const auto& yml : task_files(root)) {
      const std::string where = yml.lexically_relative(root).generic_string();
      ++tasks;
      task::TaskDefinition t;
      try {
        t = task::load_task_file(yml, root);
      } catch (const task::TaskError& e) {
        console.out << where << ": " << error_tag << " [InvalidTaskDefinition] " << e.what() << "\n";
        ++errors;
        continue;
      }
      for (const auto& prop : t.properties) {
        auto text = read_text(t.resolve(prop.property_file));
        try {
          task::parse_property(text.value_or(""));
        } catch (const task::PropertyError& e) {
          const bool unsupported = e.kind() == task::PropertyErrc::UnsupportedFormula;
          console.out << where << ": " << (unsupported ? warning_tag : error_tag)
                      << (unsupported ? " [UnsupportedProperty] " : " [MalformedProperty] ")
                      << prop.property_file.generic_string() << ": " << e.what() << "\n";
          ++(unsupported ? warnings : errors);
        }
      }
      for (const auto& v : task::validate_task(t)) {
        const bool is_error = v.severity == task::Severity::Error;
        fs::path loc = v.location.lexically_relative(fs::absolute(root).lexically_normal());
        if (loc.empty() || *loc.begin() == "..") loc = v.location.lexically_relative(root);
        console.out << where << ": " << (is_error ? error_tag : warning_tag) << " [" << task::to_string(v.rule)
                    << "] " << loc.generic_string() << ": " << v.message << "\n";
        ++(is_error ? errors : warnings);
      }
    }
  } catch (const fs::filesystem_error& e) {
    console.err << "error: " << e.what() << "\n";
    return kFailure;
  }
  console.out << "validated " << tasks << " task(s): " << errors << " error(s), " << warnings << " warning(s)\n";
  return errors ? kFindings : kOk;
}

int cmd_run(const CampaignConfig& config, Console& console, fs::path* written) {
  for (const auto& [path, what] : {std::pair{config.collection_root, "collection root"},
                                   std::pair{config.benchmark_definition, "benchmark definition"},
                                   std::pair{config.adapter_dir, "adapter directory"}}) {
    if (!fs::exists(path)) {
      console.err << "error: " << what << " not found: " << path.string() << "\n";
      return kFailure;
    }
  }
  if (config.parallel_slots == 0) {
    console.err << "error: --slots must be at least 1\n";
    return kFailure;
  }

  adapters::AdapterRegistry registry;
  adapters::BenchmarkDefinition defn;
  try {
    registry = adapters::AdapterRegistry::load_dir(config.adapter_dir);
    auto text = read_text(config.benchmark_definition);
    if (!text) throw adapters::AdapterError(adapters::AdapterErrc::MalformedDefinition, "cannot read definition");
    defn = adapters::load_benchmark_definition(*text, registry);
  } catch (const adapters::AdapterError& e) {
    console.err << "error: " << e.what() << "\n";
    return kFailure;
  }
  const adapters::ToolAdapter& adapter = *registry.find(defn.tool_name);

  if (config.strict_accounting && !exec::strict_accounting_available()) {
    console.err << "error: strict accounting requested but control groups are unavailable\n";
    return kFailure;
  }

  exec::ResourceLimits limits = config.limits_override.apply(
      defn.limits_override ? defn.limits_override->apply({}) : exec::ResourceLimits{});
  try {
    exec::validate(limits);
  } catch (const exec::ExecError& e) {
    console.err << "error: " << e.what() << "\n";
    return kFailure;
  }

  const fs::path root = fs::absolute(config.collection_root).lexically_normal();
  adapters::Expansion plan = adapters::expand_runs(defn, registry, root);
  for (const auto& s : plan.skipped) {
    console.err << "skipped " << s.run_set << "/" << s.task_file.generic_string() << ": " << s.reason << "\n";
  }

  std::vector<exec::RunSpec> specs;
  for (auto& run : plan.runs) {
    run.spec.limits = limits;
    specs.push_back(run.spec);
  }

  const StampValue stamp = make_stamp(config.stamp);
  exec::BatchOptions batch;
  batch.parallel_slots = config.parallel_slots;
  batch.accounting = config.strict_accounting ? exec::AccountingMode::Strict : exec::AccountingMode::Auto;
  const std::vector<exec::RunResult> results = exec::run_batch(specs, batch);

  report::ResultSet rs;
  rs.tool_name = defn.tool_name;
  rs.tool_version = probe_version(adapter, root);
  rs.options = defn.global_options;
  rs.limits = limits;
  rs.host_fingerprint = host_fingerprint();
  rs.started_at = stamp.iso;
  rs.metadata["parallel_slots"] = std::to_string(config.parallel_slots);

  const bool qualify = defn.run_sets.size() > 1;
  std::map<std::string, std::size_t> by_status;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& run = plan.runs[i];
    const auto& r = results[i];
    const adapters::Answer answer = adapters::determine_answer(adapter, r.exit_code, r.output, r.reason);
    if (r.reason.kind == exec::TerminationKind::HarnessError) {
      console.err << "harness error on " << run.task_id << ": " << r.reason.detail << "\n";
    }

    scoring::RunRecord rec;
    rec.task_name = qualify ? run.run_set + "/" + run.task_id : run.task_id;
    rec.property_file = run.property.generic_string();
    rec.verdict = answer.verdict;
    rec.raw_status = answer.raw_status;
    rec.expected = run.expected.holds;
    rec.cpu_time_s = r.measurement.cpu_time_s;
    rec.wall_time_s = r.measurement.wall_time_s;
    rec.peak_memory_bytes = r.measurement.peak_memory_bytes;
    rec.termination = r.reason.kind;
    rs.records.push_back(std::move(rec));
    ++by_status[answer.raw_status];

    for (const auto& [key, value] : {std::pair{"accounting", r.accounting_backend},
                                     std::pair{"core_limit_mode", r.core_limit_mode}}) {
      if (value.empty()) continue;
      auto [it, inserted] = rs.metadata.emplace(key, value);
      if (!inserted && it->second != value) it->second = "mixed";
    }
  }

  fs::path out_file;
  try {
    fs::create_directories(config.results_dir);
    out_file = config.results_dir / report::results_file_name(rs.tool_name, stamp.compact);
    report::write_results(rs, out_file);
  } catch (const std::exception& e) {
    console.err << "error: " << e.what() << "\n";
    return kFailure;
  }
  if (written) *written = out_file;

  console.out << rs.tool_name << ": " << rs.records.size() << " run(s)";
  const char* sep = " (";
  for (const auto& [status, count] : by_status) {
    console.out << sep << status << ": " << count;
    sep = ", ";
  }
  console.out << (by_status.empty() ? "" : ")") << "; results in " << out_file.string() << "\n";
  return kOk;
}

int cmd_score(const std::vector<fs::path>& files, Console& console) {
  auto sets = load_all(files, console);
  if (!sets) return kFailure;
  std::vector<scoring::CategoryResult> results;
  for (const auto& rs : *sets) results.push_back(scoring::score_records(rs.records, {}, rs.tool_name));
  try {
    results = scoring::rank(std::move(results));
  } catch (const scoring::ScoringError& e) {
    console.err << "error: " << e.what() << "\n";
    return kFailure;
  }

  using scoring::Outcome;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-20s %7s %6s %6s %6s %6s %6s %12s\n", "rank", "tool", "score", "ct", "cf",
                "it", "if", "unk", "cpu_s");
  console.out << line;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::snprintf(line, sizeof line, "%-4zu %-20s %7lld %6llu %6llu %6llu %6llu %6llu %12.3f\n", i + 1,
                  r.tool_name.c_str(), static_cast<long long>(r.score),
                  static_cast<unsigned long long>(r.counts[Outcome::CorrectTrue]),
                  static_cast<unsigned long long>(r.counts[Outcome::CorrectFalse]),
                  static_cast<unsigned long long>(r.counts[Outcome::IncorrectTrue]),
                  static_cast<unsigned long long>(r.counts[Outcome::IncorrectFalse]),
                  static_cast<unsigned long long>(r.counts[Outcome::Unknown]), r.total_cpu_time_s);
    console.out << line;
  }
  return kOk;
}

int cmd_table(const std::vector<fs::path>& files, const fs::path& out_dir, Console& console) {
  auto sets = load_all(files, console);
  if (!sets) return kFailure;
  const auto table = report::generate_table(*sets);
  try {
    fs::create_directories(out_dir);
    write_text_atomically(out_dir / "report.html", report::render_html(table));
    write_text_atomically(out_dir / "report.csv", report::render_csv(table));
  } catch (const std::exception& e) {
    console.err << "error: " << e.what() << "\n";
    return kFailure;
  }
  console.out << "wrote " << (out_dir / "report.html").string() << " and " << (out_dir / "report.csv").string()
              << " (" << table.rows.size() << " rows, " << table.tools.size() << " tool(s))\n";
  return kOk;
}

int cmd_plot(const std::vector<fs::path>& files, const fs::path& out_dir, Console& console) {
  auto sets = load_all(files, console);
  if (!sets) return kFailure;
  try {
    fs::create_directories(out_dir);
    for (const auto& rs : *sets) {
      const fs::path p = out_dir / ("quantile-" + rs.tool_name + ".csv");
      write_text_atomically(p, report::render_quantile_csv(report::quantile_data(rs)));
      console.out << "wrote " << p.string() << "\n";
    }
    for (std::size_t i = 0; i < sets->size(); ++i) {
      for (std::size_t j = i + 1; j < sets->size(); ++j) {
        const auto& a = (*sets)[i];
        const auto& b = (*sets)[j];
        const fs::path p = out_dir / ("scatter-" + a.tool_name + "-" + b.tool_name + ".csv");
        write_text_atomically(p, report::render_scatter_csv(report::scatter_data(a, b)));
        console.out << "wrote " << p.string() << "\n";
      }
    }
  } catch (const std::exception& e) {
    console.err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}

int run_cli(int argc, char** argv, Console& console) {
  CLI::App app{"Benchmark harness for software verifiers", "svbench"};
  app.require_subcommand(1);

  fs::path validate_root;
  auto* validate = app.add_subcommand("validate", "check task definitions against the benchmark conventions");
  validate->add_option("--root", validate_root, "benchmark collection root")->required();

  CampaignConfig config;
  std::string stamp = "now";
  std::optional<double> cpu_time, wall_time;
  std::optional<std::uint64_t> memory;
  std::optional<unsigned> cores;
  auto* run = app.add_subcommand("run", "execute a benchmark definition and write a results file");
  run->add_option("--root", config.collection_root, "benchmark collection root")->required();
  run->add_option("--definition", config.benchmark_definition, "benchmark definition file")->required();
  run->add_option("--adapters", config.adapter_dir, "directory of tool adapter descriptors")->required();
  run->add_option("--out", config.results_dir, "results directory")->required();
  run->add_option("--slots", config.parallel_slots, "concurrent runs")->check(CLI::PositiveNumber);
  run->add_option("--cpu-time", cpu_time, "CPU time limit in seconds");
  run->add_option("--wall-time", wall_time, "wall time limit in seconds");
  run->add_option("--memory", memory, "memory limit in bytes");
  run->add_option("--cores", cores, "cores per run");
  run->add_flag("--strict-accounting", config.strict_accounting, "fail unless control-group accounting is usable");
  run->add_option("--stamp", stamp, "timestamp source")->check(CLI::IsMember({"now", "fixed"}));

  std::vector<fs::path> score_files;
  auto* score = app.add_subcommand("score", "score and rank results files");
  score->add_option("results", score_files, "results files")->required();

  std::vector<fs::path> table_files;
  fs::path table_out;
  auto* table = app.add_subcommand("table", "write report.html and report.csv");
  table->add_option("results", table_files, "results files")->required();
  table->add_option("--out", table_out, "output directory")->required();

  std::vector<fs::path> plot_files;
  fs::path plot_out;
  auto* plot = app.add_subcommand("plot", "write quantile and scatter plot data");
  plot->add_option("results", plot_files, "results files")->required();
  plot->add_option("--out", plot_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    console.out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    console.out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    console.err << "error: " << e.what() << "\n" << app.help();
    return kFailure;
  }

  if (validate->parsed()) return cmd_validate(validate_root, console);
  if (run->parsed()) {
    config.limits_override = {cpu_time, wall_time, memory, cores};
    config.stamp = stamp == "fixed" ? Stamp::Fixed : Stamp::Now;
    return cmd_run(config, console);
  }
  if (score->parsed()) return cmd_score(score_files, console);
  if (table->parsed()) return cmd_table(table_files, table_out, console);
  if (plot->parsed()) return cmd_plot(plot_files, plot_out, console);
  return kFailure;
}

}  // namespace svbench::cli

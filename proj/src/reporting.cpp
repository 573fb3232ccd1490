#include "svbench/reporting.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace svbench::report {
namespace {

using scoring::Outcome;

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string html_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

bool solved(Outcome o) { return o == Outcome::CorrectTrue || o == Outcome::CorrectFalse; }

using Key = std::pair<std::string, std::string>;

std::map<Key, const scoring::RunRecord*> index_records(const ResultSet& rs) {
  std::map<Key, const scoring::RunRecord*> out;
  for (const auto& r : rs.records) out.emplace(Key{r.task_name, r.property_file}, &r);
  return out;
}

struct FooterLine {
  const char* label;
  std::string (*value)(const scoring::CategoryResult&);
};

const FooterLine kFooter[] = {
    {"score", [](const scoring::CategoryResult& c) { return std::to_string(c.score); }},
    {"correct-true", [](const scoring::CategoryResult& c) { return std::to_string(c.counts[Outcome::CorrectTrue]); }},
    {"correct-false", [](const scoring::CategoryResult& c) { return std::to_string(c.counts[Outcome::CorrectFalse]); }},
    {"incorrect-true", [](const scoring::CategoryResult& c) { return std::to_string(c.counts[Outcome::IncorrectTrue]); }},
    {"incorrect-false",
     [](const scoring::CategoryResult& c) { return std::to_string(c.counts[Outcome::IncorrectFalse]); }},
    {"unknown", [](const scoring::CategoryResult& c) { return std::to_string(c.counts[Outcome::Unknown]); }},
    {"cpu-time-correct", [](const scoring::CategoryResult& c) { return fixed3(c.total_cpu_time_s); }},
};

}  // namespace

ComparisonTable generate_table(const std::vector<ResultSet>& result_sets, const scoring::ScoreTable& table) {
  ComparisonTable out;
  std::vector<std::map<Key, const scoring::RunRecord*>> indexes;
  std::map<Key, std::optional<bool>> universe;
  for (const auto& rs : result_sets) {
    out.tools.push_back(rs.tool_name);
    out.footers.push_back(scoring::score_records(rs.records, table, rs.tool_name));
    indexes.push_back(index_records(rs));
    for (const auto& r : rs.records) {
      auto& expected = universe[{r.task_name, r.property_file}];
      if (!expected) expected = r.expected;
    }
  }
  for (const auto& [key, expected] : universe) {
    Row row{key.first, key.second, expected, {}};
    for (const auto& idx : indexes) {
      auto it = idx.find(key);
      if (it == idx.end()) {
        row.cells.emplace_back();
      } else {
        const auto& r = *it->second;
        row.cells.push_back(Cell{r.raw_status, scoring::outcome_of(r), r.cpu_time_s, r.peak_memory_bytes});
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string render_csv(const ComparisonTable& t) {
  std::string out = "task,property_file,expected";
  for (const auto& tool : t.tools) {
    for (const char* col : {":status", ":outcome", ":cpu_time_s", ":memory_bytes"}) out += "," + csv_field(tool + col);
  }
  out += "\n";
  for (const auto& row : t.rows) {
    out += csv_field(row.task_name) + "," + csv_field(row.property_file) + ",";
    if (row.expected) out += *row.expected ? "true" : "false";
    for (const auto& cell : row.cells) {
      if (!cell) {
        out += ",,,,";
        continue;
      }
      out += "," + csv_field(cell->status) + "," + std::string(scoring::slug(cell->outcome)) + "," +
             fixed3(cell->cpu_time_s) + "," + std::to_string(cell->memory_bytes);
    }
    out += "\n";
  }
  for (const auto& line : kFooter) {
    out += std::string("footer:") + line.label + ",,";
    for (const auto& f : t.footers) out += "," + line.value(f) + ",,,";
    out += "\n";
  }
  return out;
}

std::string render_html(const ComparisonTable& t) {
  std::string h;
  h += R"(<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>Verification results</title>
<style>
body { font-family: sans-serif; font-size: 13px; margin: 1em; }
table { border-collapse: collapse; }
th, td { border: 1px solid #bbb; padding: 2px 6px; }
th { background: #eee; }
td.num { text-align: right; font-variant-numeric: tabular-nums; }
td.correct-true, td.correct-false { background: #c8f0c8; }
td.incorrect-true, td.incorrect-false { background: #f5b5b5; }
td.unknown { background: #f0f0c0; }
td.absent { background: #fafafa; color: #999; }
tfoot td { font-weight: bold; }
#controls { margin-bottom: 0.5em; }
</style>
</head>
<body>
<div id="controls">
<input id="task-filter" type="search" placeholder="filter tasks">
<select id="outcome-filter">
<option value="">all outcomes</option>
)";
  for (Outcome o : scoring::kAllOutcomes) {
    h += "<option value=\"" + std::string(scoring::slug(o)) + "\">" + std::string(scoring::slug(o)) + "</option>\n";
  }
  h += "</select>\n</div>\n<table id=\"results\">\n<thead>\n<tr><th rowspan=\"2\">task</th><th rowspan=\"2\">property</th>"
       "<th rowspan=\"2\">expected</th>";
  for (const auto& tool : t.tools) h += "<th colspan=\"3\">" + html_escape(tool) + "</th>";
  h += "</tr>\n<tr>";
  for (std::size_t i = 0; i < t.tools.size(); ++i) h += "<th>status</th><th>cpu (s)</th><th>memory (MB)</th>";
  h += "</tr>\n</thead>\n<tbody>\n";

  char mb[64];
  for (const auto& row : t.rows) {
    h += "<tr><td>" + html_escape(row.task_name) + "</td><td>" + html_escape(row.property_file) + "</td><td>" +
         (row.expected ? (*row.expected ? "true" : "false") : "") + "</td>";
    for (const auto& cell : row.cells) {
      if (!cell) {
        h += "<td class=\"absent\" data-outcome=\"\" colspan=\"3\">&ndash;</td>";
        continue;
      }
      const std::string cls(scoring::slug(cell->outcome));
      std::snprintf(mb, sizeof mb, "%.1f", static_cast<double>(cell->memory_bytes) / 1e6);
      h += "<td class=\"" + cls + "\" data-outcome=\"" + cls + "\">" + html_escape(cell->status) +
           "</td><td class=\"num\">" + fixed3(cell->cpu_time_s) + "</td><td class=\"num\">" + mb + "</td>";
    }
    h += "</tr>\n";
  }
  h += "</tbody>\n<tfoot>\n";
  for (const auto& line : kFooter) {
    h += std::string("<tr><td colspan=\"3\">") + line.label + "</td>";
    for (const auto& f : t.footers) h += "<td class=\"num\" colspan=\"3\">" + line.value(f) + "</td>";
    h += "</tr>\n";
  }
  h += R"(</tfoot>
</table>
<script>
(function () {
  var text = document.getElementById('task-filter');
  var outcome = document.getElementById('outcome-filter');
  function apply() {
    var needle = text.value.toLowerCase();
    var want = outcome.value;
    var rows = document.querySelectorAll('#results tbody tr');
    for (var i = 0; i < rows.length; i++) {
      var row = rows[i];
      var show = row.cells[0].textContent.toLowerCase().indexOf(needle) !== -1;
      if (show && want) show = row.querySelector('td[data-outcome="' + want + '"]') !== null;
      row.style.display = show ? '' : 'none';
    }
  }
  text.addEventListener('input', apply);
  outcome.addEventListener('change', apply);
})();
</script>
</body>
</html>
)";
  return h;
}

std::vector<QuantilePoint> quantile_data(const ResultSet& rs) {
  std::vector<const scoring::RunRecord*> solved_records;
  for (const auto& r : rs.records) {
    if (solved(scoring::outcome_of(r))) solved_records.push_back(&r);
  }
  std::sort(solved_records.begin(), solved_records.end(), [](const auto* a, const auto* b) {
    if (a->cpu_time_s != b->cpu_time_s) return a->cpu_time_s < b->cpu_time_s;
    return std::tie(a->task_name, a->property_file) < std::tie(b->task_name, b->property_file);
  });
  std::vector<QuantilePoint> points;
  double sum = 0;
  for (const auto* r : solved_records) {
    sum += r->cpu_time_s;
    points.push_back({points.size() + 1, sum});
  }
  return points;
}

namespace {

double plotted_cpu(const scoring::RunRecord& r, const exec::ResourceLimits& limits) {
  using exec::TerminationKind;
  if (r.termination == TerminationKind::CpuTimeout || r.termination == TerminationKind::WallTimeout) {
    return limits.cpu_time_s;
  }
  if (r.termination != TerminationKind::Normal) return std::min(r.cpu_time_s, limits.cpu_time_s);
  return r.cpu_time_s;
}

}  // namespace

std::vector<ScatterPoint> scatter_data(const ResultSet& a, const ResultSet& b) {
  const auto ia = index_records(a);
  const auto ib = index_records(b);
  std::vector<ScatterPoint> out;
  for (const auto& [key, ra] : ia) {
    auto it = ib.find(key);
    if (it == ib.end()) continue;
    const auto* rb = it->second;
    out.push_back({key.first, plotted_cpu(*ra, a.limits), plotted_cpu(*rb, b.limits), scoring::outcome_of(*ra),
                   scoring::outcome_of(*rb)});
  }
  return out;
}

std::string render_quantile_csv(const std::vector<QuantilePoint>& points) {
  std::string out = "n,cumulative_cpu_time_s\n";
  for (const auto& p : points) out += std::to_string(p.n) + "," + fixed3(p.cumulative_cpu_time_s) + "\n";
  return out;
}

std::string render_scatter_csv(const std::vector<ScatterPoint>& points) {
  std::string out = "task_name,cpu_a,cpu_b,outcome_a,outcome_b\n";
  for (const auto& p : points) {
    out += csv_field(p.task_name) + "," + fixed3(p.cpu_a) + "," + fixed3(p.cpu_b) + "," +
           std::string(scoring::to_string(p.outcome_a)) + "," + std::string(scoring::to_string(p.outcome_b)) + "\n";
  }
  return out;
}

}  // namespace svbench::report

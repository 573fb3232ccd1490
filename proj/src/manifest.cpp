#include "svbench/manifest.hpp"

#include <charconv>
#include <map>

namespace svbench::task {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t rounded_mean(std::uint64_t sum, std::uint64_t count) { return (2 * sum + count) / (2 * count); }

}  // namespace

std::vector<ManifestItem> parse_manifest_csv(std::string_view text) {
  std::vector<ManifestItem> items;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    auto bad = [&](const char* why) {
      return ManifestError(ManifestErrc::MalformedManifest, "line " + std::to_string(line_no) + ": " + why);
    };
    std::size_t c1 = line.find(',');
    std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw bad("expected set_name,is_safe,loc");
    }
    ManifestItem item;
    item.set_name = std::string(trim(line.substr(0, c1)));
    std::string_view safe = trim(line.substr(c1 + 1, c2 - c1 - 1));
    std::string_view loc = trim(line.substr(c2 + 1));
    if (item.set_name.empty()) throw bad("empty set name");
    if (safe == "true") {
      item.is_safe = true;
    } else if (safe != "false") {
      throw bad("is_safe must be true or false");
    }
    auto [ptr, ec] = std::from_chars(loc.data(), loc.data() + loc.size(), item.loc);
    if (ec != std::errc{} || ptr != loc.data() + loc.size()) throw bad("loc must be a non-negative integer");
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<ManifestEntry> summarize_manifest(const std::vector<ManifestItem>& items) {
  if (items.empty()) throw ManifestError(ManifestErrc::EmptyManifest, "manifest has no entries");

  struct Acc {
    ManifestEntry entry;
    std::uint64_t loc_sum = 0;
  };
  std::vector<Acc> sets;
  std::map<std::string, std::size_t> index;
  Acc total{{"total"}, 0};

  for (const auto& item : items) {
    auto [it, inserted] = index.try_emplace(item.set_name, sets.size());
    if (inserted) sets.push_back({{item.set_name}, 0});
    for (Acc* acc : {&sets[it->second], &total}) {
      ++acc->entry.total;
      ++(item.is_safe ? acc->entry.safe : acc->entry.unsafe);
      acc->loc_sum += item.loc;
    }
  }

  std::vector<ManifestEntry> out;
  out.reserve(sets.size() + 1);
  for (auto& acc : sets) {
    acc.entry.avg_loc = rounded_mean(acc.loc_sum, acc.entry.total);
    out.push_back(acc.entry);
  }
  total.entry.avg_loc = rounded_mean(total.loc_sum, total.entry.total);
  out.push_back(total.entry);
  return out;
}

}  // namespace svbench::task

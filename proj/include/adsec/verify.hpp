#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adsec/csv.hpp"
#include "adsec/errors.hpp"
#include "adsec/ltl.hpp"

namespace adsec {

struct Trace {
  std::string name;
  std::vector<std::string> events;
  std::string source_case;  // test case that produced the trace, if known

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct TraceSet {
  std::vector<Trace> traces;  // names unique, sorted by name

  friend bool operator==(const TraceSet&, const TraceSet&) = default;
};

// Loads every *.log file of a directory: one event label per line, a blank
// line separates traces within a file. A file holding a single trace is
// named by its stem, otherwise traces are named stem#1, stem#2, ...
// An optional manifest.csv (trace, case) attaches source test-case ids.
inline TraceSet load_traces(const std::filesystem::path& dir,
                            std::vector<std::string>* warnings = nullptr) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("trace directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".log")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  TraceSet set;
  for (const std::filesystem::path& file : files) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open trace log: " + file.string());
    std::vector<std::vector<std::string>> chunks(1);
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
      if (line.empty()) {
        if (!chunks.back().empty()) chunks.emplace_back();
      } else {
        chunks.back().push_back(line);
      }
    }
    if (chunks.back().empty()) chunks.pop_back();
    std::string stem = file.stem().string();
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      Trace t;
      t.name = chunks.size() == 1 ? stem : stem + "#" + std::to_string(i + 1);
      t.events = std::move(chunks[i]);
      set.traces.push_back(std::move(t));
    }
  }
  std::sort(set.traces.begin(), set.traces.end(),
            [](const Trace& a, const Trace& b) { return a.name < b.name; });

  std::filesystem::path manifest = dir / "manifest.csv";
  if (std::filesystem::exists(manifest)) {
    CsvTable table = load_csv(manifest);
    std::size_t ti = table.column("trace", "manifest.csv");
    std::size_t ci = table.column("case", "manifest.csv");
    for (const auto& row : table.rows) {
      auto it = std::find_if(set.traces.begin(), set.traces.end(),
                             [&](const Trace& t) { return t.name == row[ti]; });
      if (it == set.traces.end()) {
        if (warnings)
          warnings->push_back("manifest.csv names unknown trace '" + row[ti] + "'");
        continue;
      }
      it->source_case = row[ci];
    }
  }
  return set;
}

struct PropertyOutcome {
  LtlFormula property;
  bool holds = true;
  // Lexicographically least (trace name, position) among violations.
  std::optional<std::pair<std::string, std::size_t>> witness;
};

struct PatternVerdict {
  std::string pattern;
  std::vector<PropertyOutcome> outcomes;
  bool unsat = false;  // some property fails on some trace
  std::vector<std::string> warnings;
};

// Checks every property of one pattern against every trace. Each trace is
// first reduced to the union alphabet of the property list; negations make
// verdicts depend on that alphabet, so the reduction is part of the
// semantics, not an optimization. Witness positions refer to the reduced
// trace.
inline PatternVerdict verify_pattern(const std::vector<LtlFormula>& properties,
                                     const TraceSet& traces,
                                     const std::string& pattern = "") {
  PatternVerdict verdict;
  verdict.pattern = pattern;
  if (traces.traces.empty() && !properties.empty())
    verdict.warnings.push_back("no traces collected; pattern '" + pattern +
                               "' has no evidence");

  std::set<std::string> union_alphabet;
  for (const LtlFormula& p : properties) {
    std::set<std::string> a = alphabet(p);
    union_alphabet.insert(a.begin(), a.end());
  }
  std::vector<std::pair<const Trace*, EventTrace>> filtered;
  for (const Trace& t : traces.traces)
    filtered.emplace_back(&t, filter_trace(t.events, union_alphabet));

  for (const LtlFormula& p : properties) {
    PropertyOutcome outcome{p, true, std::nullopt};
    for (const auto& [trace, events] : filtered) {
      CheckResult r = check(p, events);
      if (r.holds) continue;
      outcome.holds = false;
      std::pair<std::string, std::size_t> w{trace->name, r.violation_position};
      if (!outcome.witness || w < *outcome.witness) outcome.witness = w;
    }
    if (!outcome.holds) verdict.unsat = true;
    verdict.outcomes.push_back(std::move(outcome));
  }
  return verdict;
}

struct GlobalVerdict {
  std::vector<PatternVerdict> per_pattern;  // input order
  bool unsat = false;  // some pattern has a failing property
  std::vector<std::string> warnings;
};

inline GlobalVerdict verify_all(
    const std::vector<std::pair<std::string, std::vector<LtlFormula>>>& per_pattern,
    const TraceSet& traces) {
  GlobalVerdict global;
  if (per_pattern.empty())
    global.warnings.push_back("no security patterns to verify");
  for (const auto& [pattern, properties] : per_pattern) {
    PatternVerdict v = verify_pattern(properties, traces, pattern);
    global.unsat = global.unsat || v.unsat;
    global.warnings.insert(global.warnings.end(), v.warnings.begin(), v.warnings.end());
    global.per_pattern.push_back(std::move(v));
  }
  return global;
}

}  // namespace adsec

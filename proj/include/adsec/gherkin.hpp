#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adsec/errors.hpp"

namespace adsec {

// Gherkin subset: tag lines, one Feature line, Scenario blocks made of
// Given/When/Then steps, # comments attached to the construct that follows
// them. emit_gherkin(parse_gherkin(emit_gherkin(f))) == emit_gherkin(f).

struct GherkinStep {
  std::string keyword;  // Given | When | Then
  std::string text;
  std::vector<std::string> comments_before;  // text after '#', verbatim

  friend bool operator==(const GherkinStep&, const GherkinStep&) = default;
};

struct GherkinScenario {
  std::string name;
  std::vector<std::string> comments_before;
  std::vector<GherkinStep> steps;

  friend bool operator==(const GherkinScenario&, const GherkinScenario&) = default;
};

struct GherkinFeature {
  std::vector<std::string> tags;  // without the '@'
  std::string name;
  std::vector<GherkinScenario> scenarios;
  std::vector<std::string> trailing_comments;

  friend bool operator==(const GherkinFeature&, const GherkinFeature&) = default;
};

inline std::string emit_gherkin(const GherkinFeature& f) {
  std::string out;
  for (const std::string& tag : f.tags) out += "@" + tag + "\n";
  out += "Feature: " + f.name + "\n";
  for (std::size_t i = 0; i < f.scenarios.size(); ++i) {
    const GherkinScenario& s = f.scenarios[i];
    if (i > 0) out += "\n";
    for (const std::string& c : s.comments_before) out += "#" + c + "\n";
    out += "Scenario: " + s.name + "\n";
    for (const GherkinStep& st : s.steps) {
      for (const std::string& c : st.comments_before) out += "#" + c + "\n";
      out += st.keyword + " " + st.text + "\n";
    }
  }
  for (const std::string& c : f.trailing_comments) out += "#" + c + "\n";
  return out;
}

namespace detail {

inline bool starts_with_keyword(const std::string& line, const std::string& kw,
                                std::string& rest) {
  if (line.size() < kw.size() || line.compare(0, kw.size(), kw) != 0) return false;
  if (line.size() == kw.size()) {
    rest.clear();
    return true;
  }
  char next = line[kw.size()];
  if (next != ' ' && next != '\t') return false;
  std::size_t start = line.find_first_not_of(" \t", kw.size());
  rest = start == std::string::npos ? std::string() : line.substr(start);
  return true;
}

}  // namespace detail

inline GherkinFeature parse_gherkin(const std::string& text,
                                    const std::string& origin = "gherkin") {
  GherkinFeature feature;
  bool seen_feature = false;
  std::vector<std::string> pending_comments;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;  // blank: block separator
    std::string body = line.substr(first);

    if (body[0] == '#') {
      if (!seen_feature)
        throw ParseError(origin + ": comment before the Feature line", line_no);
      pending_comments.push_back(body.substr(1));
      continue;
    }
    if (body[0] == '@') {
      if (seen_feature)
        throw ParseError(origin + ": tag line after the Feature line", line_no);
      std::istringstream tags(body);
      std::string tag;
      while (tags >> tag) {
        if (tag[0] != '@')
          throw ParseError(origin + ": malformed tag '" + tag + "'", line_no);
        feature.tags.push_back(tag.substr(1));
      }
      continue;
    }
    std::string rest;
    if (body.compare(0, 8, "Feature:") == 0) {
      if (seen_feature) throw ParseError(origin + ": second Feature line", line_no);
      seen_feature = true;
      std::size_t start = body.find_first_not_of(" \t", 8);
      feature.name = start == std::string::npos ? std::string() : body.substr(start);
      continue;
    }
    if (body.compare(0, 9, "Scenario:") == 0) {
      if (!seen_feature)
        throw ParseError(origin + ": Scenario before the Feature line", line_no);
      GherkinScenario s;
      std::size_t start = body.find_first_not_of(" \t", 9);
      s.name = start == std::string::npos ? std::string() : body.substr(start);
      s.comments_before = std::move(pending_comments);
      pending_comments.clear();
      feature.scenarios.push_back(std::move(s));
      continue;
    }
    if (detail::starts_with_keyword(body, "Given", rest) ||
        detail::starts_with_keyword(body, "When", rest) ||
        detail::starts_with_keyword(body, "Then", rest)) {
      if (feature.scenarios.empty())
        throw ParseError(origin + ": step line outside any Scenario", line_no);
      GherkinStep st;
      st.keyword = body.substr(0, body.find_first_of(" \t"));
      st.text = rest;
      st.comments_before = std::move(pending_comments);
      pending_comments.clear();
      feature.scenarios.back().steps.push_back(std::move(st));
      continue;
    }
    throw ParseError(origin + ": unrecognized line '" + body + "'", line_no);
  }
  if (!seen_feature) throw ParseError(origin + ": no Feature line found");
  feature.trailing_comments = std::move(pending_comments);
  return feature;
}

inline GherkinFeature load_gherkin(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open feature file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_gherkin(buf.str(), path.filename().string());
}

inline void save_gherkin(const GherkinFeature& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write feature file: " + path.string());
  out << emit_gherkin(f);
  if (!out) throw IoError("failed writing feature file: " + path.string());
}

}  // namespace adsec

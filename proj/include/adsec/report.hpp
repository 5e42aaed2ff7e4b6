#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "adsec/testgen.hpp"
#include "adsec/verify.hpp"

namespace adsec {

// Joins the security-testing view (Definition 5 predicates over scenarios)
// with the pattern-verification view (Unsat over LTL properties) and selects
// the Table III corrective action for the combined booleans.
struct CombinedReport {
  SecurityReport security;
  GlobalVerdict patterns;
  bool vulnerable = false;
  bool unsat = false;
  bool inconclusive = false;
  std::string recommendation;
};

inline CombinedReport combine(SecurityReport security, GlobalVerdict patterns) {
  CombinedReport r;
  r.vulnerable = security.vulnerable;
  r.unsat = patterns.unsat;
  r.inconclusive = security.inconclusive;
  r.recommendation = recommend(r.vulnerable, r.unsat, r.inconclusive);
  r.security = std::move(security);
  r.patterns = std::move(patterns);
  return r;
}

inline std::string security_report_text(const SecurityReport& r) {
  std::string out = "Security testing report\n";
  out += "  Vulnerable: " + std::string(r.vulnerable ? "true" : "false") + "\n";
  out += "  Inconclusive: " + std::string(r.inconclusive ? "true" : "false") + "\n";
  out += "  attack steps:\n";
  for (const auto& [b, verdict] : r.per_badstep) {
    const char* text = verdict == Verdict::pass          ? "vulnerable (test passed)"
                       : verdict == Verdict::inconclusive ? "inconclusive"
                                                          : "resisted";
    out += "    " + b.step + ": " + text + "\n";
  }
  out += "  scenarios:\n";
  for (std::size_t i = 0; i < r.per_scenario.size(); ++i) {
    const ScenarioOutcome& s = r.per_scenario[i];
    std::string steps;
    for (const std::string& label : s.scenario.step_labels()) {
      if (!steps.empty()) steps += " -> ";
      steps += label;
    }
    out += "    " + std::to_string(i + 1) + ": [" + steps + "] vulnerable=" +
           (s.vulnerable ? "true" : "false") + " inconclusive=" +
           (s.inconclusive ? "true" : "false") + "\n";
  }
  return out;
}

inline nlohmann::json security_report_json(const SecurityReport& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& [b, verdict] : r.per_badstep)
    steps.push_back({{"step", b.step},
                     {"patterns", b.patterns},
                     {"verdict", to_string(verdict)},
                     {"vulnerable", verdict == Verdict::pass}});
  nlohmann::json scenarios = nlohmann::json::array();
  for (const ScenarioOutcome& s : r.per_scenario)
    scenarios.push_back({{"steps", s.scenario.step_labels()},
                         {"ordered", s.scenario.ordered},
                         {"vulnerable", s.vulnerable},
                         {"inconclusive", s.inconclusive}});
  return {{"vulnerable", r.vulnerable},
          {"inconclusive", r.inconclusive},
          {"steps", steps},
          {"scenarios", scenarios},
          {"recommendation", r.recommendation}};
}

inline std::string pattern_report_text(const GlobalVerdict& g) {
  std::string out = "Pattern verification report\n";
  out += "  Unsat: " + std::string(g.unsat ? "true" : "false") + "\n";
  for (const PatternVerdict& v : g.per_pattern) {
    out += "  pattern " + v.pattern + ": " + (v.unsat ? "unsat" : "satisfied") + "\n";
    for (const PropertyOutcome& o : v.outcomes) {
      out += "    " + to_string(o.property) + ": ";
      if (o.holds) {
        out += "holds\n";
      } else {
        out += "violated";
        if (o.witness)
          out += " (trace '" + o.witness->first + "', position " +
                 std::to_string(o.witness->second) + ")";
        out += "\n";
      }
    }
  }
  for (const std::string& w : g.warnings) out += "  warning: " + w + "\n";
  return out;
}

inline nlohmann::json pattern_report_json(const GlobalVerdict& g) {
  nlohmann::json patterns = nlohmann::json::array();
  for (const PatternVerdict& v : g.per_pattern) {
    nlohmann::json outcomes = nlohmann::json::array();
    for (const PropertyOutcome& o : v.outcomes) {
      nlohmann::json entry = {{"property", to_string(o.property)}, {"holds", o.holds}};
      if (o.witness)
        entry["witness"] = {{"trace", o.witness->first}, {"position", o.witness->second}};
      outcomes.push_back(std::move(entry));
    }
    patterns.push_back(
        {{"pattern", v.pattern}, {"unsat", v.unsat}, {"properties", std::move(outcomes)}});
  }
  return {{"unsat", g.unsat}, {"patterns", std::move(patterns)}, {"warnings", g.warnings}};
}

inline std::string combined_report_text(const CombinedReport& r) {
  std::string out = "Verdict summary\n";
  out += "  Vulnerable(T_f): " + std::string(r.vulnerable ? "true" : "false") + "\n";
  out += "  Unsat(SP(T_f)): " + std::string(r.unsat ? "true" : "false") + "\n";
  out += "  Inconclusive(T_f): " + std::string(r.inconclusive ? "true" : "false") + "\n";
  out += "  Recommendation: " + r.recommendation + "\n\n";
  out += security_report_text(r.security) + "\n" + pattern_report_text(r.patterns);
  return out;
}

inline nlohmann::json combined_report_json(const CombinedReport& r) {
  return {{"vulnerable", r.vulnerable},
          {"unsat", r.unsat},
          {"inconclusive", r.inconclusive},
          {"recommendation", r.recommendation},
          {"security", security_report_json(r.security)},
          {"patterns", pattern_report_json(r.patterns)}};
}

}  // namespace adsec

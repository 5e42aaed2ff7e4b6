#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adsec/adterm.hpp"
#include "adsec/csv.hpp"
#include "adsec/errors.hpp"
#include "adsec/gherkin.hpp"
#include "adsec/kb.hpp"

namespace adsec {

struct TestCase {
  std::string id;  // "tc-" + step id
  BadStep badstep;
  std::string attack;  // owning attack id, feature file key
  std::string given, when, then;  // section titles
  std::string given_procedure, when_procedure, then_procedure;  // procedure ids

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct TestSuite {
  std::vector<TestCase> cases;  // document order of BADSteps
  std::vector<Scenario> scenarios;
  std::vector<std::vector<std::string>> scenario_cases;  // case ids per scenario
  std::vector<GherkinFeature> features;                  // one per owning attack
  std::map<std::string, Procedure> procedures;           // distinct procedures
  std::vector<std::string> warnings;
};

inline std::string case_id_for(const std::string& step) { return "tc-" + step; }

namespace detail {

inline std::string tag_of(const std::string& attack_id) {
  std::string tag;
  for (char c : attack_id)
    if (std::isalnum(static_cast<unsigned char>(c)))
      tag += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return tag.empty() ? "attack" : tag;
}

}  // namespace detail

// Builds the GWT test suite of a final tree's term: one case per distinct
// BADStep, one feature file per owning attack, scenarios indexed by case id.
inline TestSuite generate_test_suite(const AdTerm& tf, const KnowledgeBase& kb,
                                     const std::string& context_id,
                                     std::size_t max_scenarios = default_scenario_limit) {
  if (auto violation = find_form_violation(tf))
    throw MalformedTermError("term is not in generated form: " + violation->reason);

  TestSuite suite;
  suite.scenarios = extract_scenarios(tf, max_scenarios);

  for (const BadStep& b : badsteps(tf)) {
    GwtSections sections = test_sections(kb, b.step, context_id);
    TestCase tc;
    tc.id = case_id_for(b.step);
    tc.badstep = b;
    if (auto attack = attack_of_step(kb, b.step)) {
      tc.attack = *attack;
    } else if (kb.attacks.count(b.step)) {
      tc.attack = b.step;  // empty-step fallback: the step is the attack
    } else {
      tc.attack = "unassigned";
      suite.warnings.push_back("step '" + b.step +
                               "' belongs to no attack; filed under 'unassigned'");
    }
    tc.given = sections.given.title;
    tc.when = sections.when.title;
    tc.then = sections.then.title;
    tc.given_procedure = sections.given.procedure;
    tc.when_procedure = sections.when.procedure;
    tc.then_procedure = sections.then.procedure;
    suite.procedures.emplace(sections.given.procedure, sections.given_procedure);
    suite.procedures.emplace(sections.when.procedure, sections.when_procedure);
    suite.procedures.emplace(sections.then.procedure, sections.then_procedure);
    suite.cases.push_back(std::move(tc));
  }

  for (const Scenario& s : suite.scenarios) {
    std::vector<std::string> ids;
    for (const std::string& step : s.step_labels()) ids.push_back(case_id_for(step));
    suite.scenario_cases.push_back(std::move(ids));
  }

  // Feature files keyed by owning attack, in first-occurrence order.
  std::vector<std::string> feature_order;
  std::map<std::string, GherkinFeature> by_attack;
  for (const TestCase& tc : suite.cases) {
    if (!by_attack.count(tc.attack)) {
      feature_order.push_back(tc.attack);
      GherkinFeature f;
      f.tags = {detail::tag_of(tc.attack)};
      auto attack = kb.attacks.find(tc.attack);
      f.name = attack != kb.attacks.end() ? tc.attack + ": " + attack->second.name
                                          : tc.attack;
      by_attack.emplace(tc.attack, std::move(f));
    }
    GherkinScenario scenario;
    auto step = kb.steps.find(tc.badstep.step);
    if (step != kb.steps.end()) {
      if (!step->second.phase.empty()) scenario.comments_before = {step->second.phase};
      scenario.name = "Step" + step->second.ordinal + " " + step->second.name;
    } else {
      scenario.name = tc.badstep.step;
    }
    scenario.steps.push_back(GherkinStep{"Given", tc.given, {}});
    scenario.steps.push_back(GherkinStep{"When", tc.when, {}});
    scenario.steps.push_back(
        GherkinStep{"Then", tc.then, {" assertion for attack step success"}});
    by_attack.at(tc.attack).scenarios.push_back(std::move(scenario));
  }
  for (const std::string& attack : feature_order)
    suite.features.push_back(std::move(by_attack.at(attack)));
  return suite;
}

// Writes features/<attack>.feature, procedures/<id>.txt and two index
// tables (cases.csv, scenarios.csv) under the output directory.
inline std::vector<std::filesystem::path> write_test_suite(
    const TestSuite& suite, const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  std::filesystem::create_directories(out_dir / "features");
  std::filesystem::create_directories(out_dir / "procedures");

  std::vector<std::string> feature_order;
  for (const TestCase& tc : suite.cases)
    if (std::find(feature_order.begin(), feature_order.end(), tc.attack) ==
        feature_order.end())
      feature_order.push_back(tc.attack);
  for (std::size_t i = 0; i < suite.features.size(); ++i) {
    std::filesystem::path path = out_dir / "features" / (feature_order.at(i) + ".feature");
    save_gherkin(suite.features[i], path);
    written.push_back(path);
  }
  for (const auto& [id, proc] : suite.procedures) {
    std::filesystem::path path = out_dir / "procedures" / (id + ".txt");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write procedure stub: " + path.string());
    out << proc.comment << "\n";
    if (!proc.snippet.empty()) out << "\n" << proc.snippet << "\n";
    written.push_back(path);
  }
  {
    CsvTable t;
    t.header = {"case-id", "step-id", "attack-id", "given-procedure", "when-procedure",
                "then-procedure"};
    for (const TestCase& tc : suite.cases)
      t.rows.push_back({tc.id, tc.badstep.step, tc.attack, tc.given_procedure,
                        tc.when_procedure, tc.then_procedure});
    save_csv(t, out_dir / "cases.csv");
    written.push_back(out_dir / "cases.csv");
  }
  {
    CsvTable t;
    t.header = {"scenario", "case-ids"};
    for (std::size_t i = 0; i < suite.scenario_cases.size(); ++i) {
      std::string joined;
      for (const std::string& id : suite.scenario_cases[i]) {
        if (!joined.empty()) joined += " ";
        joined += id;
      }
      t.rows.push_back({std::to_string(i + 1), joined});
    }
    save_csv(t, out_dir / "scenarios.csv");
    written.push_back(out_dir / "scenarios.csv");
  }
  return written;
}

enum class Verdict { pass, fail, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "Pass";
    case Verdict::fail: return "Fail";
    default: return "Inconclusive";
  }
}

struct VerdictIngest {
  std::map<std::string, Verdict> by_case;
  std::vector<std::string> warnings;
};

// Reads a results table (case-id, verdict). Every listed id must belong to
// the suite and appear once; unlisted cases default to Inconclusive with a
// warning, since silence means the execution did not report.
inline VerdictIngest ingest_verdicts(const TestSuite& suite,
                                     const std::filesystem::path& results) {
  CsvTable table = load_csv(results);
  std::string origin = results.filename().string();
  std::size_t ci = table.column("case-id", origin);
  std::size_t vi = table.column("verdict", origin);

  std::set<std::string> known;
  for (const TestCase& tc : suite.cases) known.insert(tc.id);

  VerdictIngest out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& id = table.rows[r][ci];
    const std::string& text = table.rows[r][vi];
    if (!known.count(id))
      throw VerdictError(origin + ": row " + std::to_string(r + 2) +
                         ": unknown test case id '" + id + "'");
    Verdict v;
    if (text == "Pass")
      v = Verdict::pass;
    else if (text == "Fail")
      v = Verdict::fail;
    else if (text == "Inconclusive")
      v = Verdict::inconclusive;
    else
      throw VerdictError(origin + ": row " + std::to_string(r + 2) + ": unknown verdict '" +
                         text + "' for case '" + id + "'");
    if (!out.by_case.emplace(id, v).second)
      throw VerdictError(origin + ": row " + std::to_string(r + 2) +
                         ": duplicate verdict for case '" + id + "'");
  }
  for (const TestCase& tc : suite.cases)
    if (!out.by_case.count(tc.id)) {
      out.by_case.emplace(tc.id, Verdict::inconclusive);
      out.warnings.push_back("case '" + tc.id +
                             "' was not reported; defaulting to Inconclusive");
    }
  return out;
}

// Re-keys case verdicts by BADStep label for evaluation.
inline std::map<std::string, Verdict> verdicts_by_step(const TestSuite& suite,
                                                       const std::map<std::string, Verdict>& by_case) {
  std::map<std::string, Verdict> out;
  for (const TestCase& tc : suite.cases) {
    auto it = by_case.find(tc.id);
    if (it == by_case.end()) throw VerdictError("missing verdict for case '" + tc.id + "'");
    out.emplace(tc.badstep.step, it->second);
  }
  return out;
}

// Table III: corrective action for (Vulnerable(T_f), Unsat(SP(T_f)),
// Inconclusive(T_f)). An inconclusive run dominates the other two flags.
inline std::string recommend(bool vulnerable, bool unsat, bool inconclusive) {
  if (inconclusive)
    return "The test case execution crashed or returned unexpected exceptions. Check the "
           "Test architecture and the test case codes.";
  if (vulnerable && unsat)
    return "The chosen security patterns are useless or incorrectly implemented. Review the "
           "ADTree, fix AUT.";
  if (!vulnerable && unsat)
    return "Some pattern behavioural properties do not hold. Check the pattern "
           "implementations with the UML seq. diag. Or another pattern conceals the "
           "behaviour of the former.";
  if (vulnerable)
    return "At least one scenario is successfully applied on AUT. Fix the pattern "
           "implementation. Or the chosen patterns are inconvenient.";
  return "No issue detected";
}

struct ScenarioOutcome {
  Scenario scenario;
  bool vulnerable = false;
  bool inconclusive = false;
};

struct SecurityReport {
  std::vector<std::pair<BadStep, Verdict>> per_badstep;  // Vulnerable(b) = (verdict == pass)
  std::vector<ScenarioOutcome> per_scenario;
  bool vulnerable = false;    // Vulnerable(T_f)
  bool inconclusive = false;  // Inconclusive(T_f)
  // Table III row assuming the pattern predicate is false; the combined
  // report recomputes it once Unsat(SP(T_f)) is known.
  std::string recommendation;
};

// Evaluates the security predicates over the final tree's scenarios:
// Vulnerable(b) holds when the step's test passed (the attack succeeded),
// Vulnerable(s) evaluates the scenario's term under that assignment, and an
// Inconclusive verdict anywhere in a scenario marks the scenario (and thus
// the tree) inconclusive. Both global predicates are existential folds.
inline SecurityReport evaluate_security(const AdTerm& tf,
                                        const std::map<std::string, Verdict>& by_step,
                                        std::size_t max_scenarios = default_scenario_limit) {
  SecurityReport report;
  Assignment assignment;
  for (const BadStep& b : badsteps(tf)) {
    auto it = by_step.find(b.step);
    if (it == by_step.end()) throw VerdictError("missing verdict for step '" + b.step + "'");
    assignment[b.step] = it->second == Verdict::pass;
    report.per_badstep.emplace_back(b, it->second);
  }
  for (Scenario& s : extract_scenarios(tf, max_scenarios)) {
    ScenarioOutcome outcome{std::move(s), false, false};
    outcome.vulnerable = eval(outcome.scenario.term, assignment);
    for (const std::string& step : outcome.scenario.step_labels())
      if (by_step.at(step) == Verdict::inconclusive) outcome.inconclusive = true;
    report.vulnerable = report.vulnerable || outcome.vulnerable;
    report.inconclusive = report.inconclusive || outcome.inconclusive;
    report.per_scenario.push_back(std::move(outcome));
  }
  report.recommendation = recommend(report.vulnerable, false, report.inconclusive);
  return report;
}

}  // namespace adsec

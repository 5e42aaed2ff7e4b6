#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "adsec/adsec.hpp"

namespace fs = std::filesystem;
using namespace adsec;

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string slug(const std::string& id) {
  std::string out;
  for (char c : id) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '-')
      out += '-';
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "unnamed" : out;
}

void write_text(const fs::path& path, const std::string& content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

// LTL properties of one pattern in one context: every diagram's rules, in
// diagram order.
std::vector<LtlFormula> pattern_properties(const KnowledgeBase& kb, const std::string& pattern,
                                           const std::string& context,
                                           std::vector<std::string>* warnings) {
  std::vector<LtlFormula> out;
  for (const SequenceDiagram& d : diagrams_for(kb, pattern, context))
    for (const GeneratedProperty& p : diagram_properties(d, warnings))
      out.push_back(p.formula);
  return out;
}

TestSuite rebuild_suite(const AdTree& tree, const KnowledgeBase& kb,
                        const std::string& context, std::size_t max_scenarios) {
  return generate_test_suite(to_adterm(tree), kb, context, max_scenarios);
}

SecurityReport run_security(const AdTree& tree, const KnowledgeBase& kb,
                            const std::string& context, const fs::path& results,
                            std::size_t max_scenarios) {
  TestSuite suite = rebuild_suite(tree, kb, context, max_scenarios);
  VerdictIngest ingest = ingest_verdicts(suite, results);
  print_warnings(ingest.warnings);
  return evaluate_security(to_adterm(tree), verdicts_by_step(suite, ingest.by_case),
                           max_scenarios);
}

GlobalVerdict run_verify(const AdTree& tree, const KnowledgeBase& kb,
                         const std::string& context, const fs::path& traces_dir) {
  std::vector<std::string> warnings;
  TraceSet traces = load_traces(traces_dir, &warnings);
  std::vector<std::pair<std::string, std::vector<LtlFormula>>> per_pattern;
  for (const std::string& p : pattern_set(tree)) {
    std::vector<LtlFormula> props = pattern_properties(kb, p, context, &warnings);
    if (props.empty())
      warnings.push_back("pattern '" + p + "' has no properties in context '" + context +
                         "'; it is vacuously satisfied");
    per_pattern.emplace_back(p, std::move(props));
  }
  print_warnings(warnings);
  return verify_all(per_pattern, traces);
}

PatternChoice prompt_missing(const AdTree& tree, PatternChoice choice) {
  for (const AlternativeGroup& g : alternative_groups(tree)) {
    if (choice.selections.count({g.step, g.ordinal})) continue;
    std::cout << "Step " << g.step << ", Alternative group " << g.ordinal << ":\n";
    for (std::size_t i = 0; i < g.options.size(); ++i)
      std::cout << "  " << i + 1 << ") " << g.options[i] << "\n";
    for (;;) {
      std::cout << "choice [1-" << g.options.size() << "]: " << std::flush;
      std::string line;
      if (!std::getline(std::cin, line))
        throw Error("input closed before all Alternative groups were resolved");
      try {
        std::size_t pick = std::stoul(line);
        if (pick >= 1 && pick <= g.options.size()) {
          choice.selections[{g.step, g.ordinal}] = g.options[pick - 1];
          break;
        }
      } catch (const std::exception&) {
      }
      std::cout << "please answer with a number between 1 and " << g.options.size() << "\n";
    }
  }
  return choice;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attack-defense tree security testing toolkit"};
  app.require_subcommand(1);

  std::string kb_dir;
  std::string context = "web";
  std::string out_dir = "out";
  std::string choices_file, results_file, traces_dir;
  std::size_t max_scenarios = default_scenario_limit;
  std::string attack_id, pattern_id, tree_file;

  auto add_kb = [&](CLI::App* cmd) {
    cmd->add_option("--kb", kb_dir, "knowledge base directory")->required();
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--context", context, "application context id (default: web)");
    cmd->add_option("--out", out_dir, "output directory (default: out)");
  };

  CLI::App* kb_cmd = app.add_subcommand("kb", "knowledge base operations");
  kb_cmd->require_subcommand(1);
  CLI::App* kb_validate = kb_cmd->add_subcommand("validate", "check every integrity rule");
  add_kb(kb_validate);
  kb_validate->callback([&] {
    KnowledgeBase kb = load_kb_raw(kb_dir);
    std::vector<std::string> violations = validate(kb);
    for (const std::string& v : violations) std::cout << v << "\n";
    std::cout << violations.size() << " violations\n";
    if (!violations.empty()) throw KbIntegrityError(std::move(violations));
  });

  CLI::App* tree_cmd = app.add_subcommand("tree", "attack-defense tree operations");
  tree_cmd->require_subcommand(1);

  CLI::App* tree_generate = tree_cmd->add_subcommand("generate", "generate a tree for an attack");
  tree_generate->add_option("attack", attack_id, "attack id")->required();
  add_kb(tree_generate);
  add_common(tree_generate);
  tree_generate->callback([&] {
    KnowledgeBase kb = load_kb(kb_dir);
    std::vector<std::string> warnings;
    AdTree tree = generate_attack_tree(kb, attack_id, &warnings);
    print_warnings(warnings);
    fs::path path = fs::path(out_dir) / (attack_id + ".xml");
    write_text(path, serialize_adtree(tree));
    std::cout << "wrote " << path.string() << "\n";
  });

  CLI::App* tree_choose = tree_cmd->add_subcommand(
      "choose", "resolve Alternative groups, interactively unless a choice file covers them");
  tree_choose->add_option("tree", tree_file, "generated tree XML")->required();
  tree_choose->add_option("--choices", choices_file, "pattern choice file (read and written)");
  tree_choose->add_option("--out", out_dir, "output directory (default: out)");
  tree_choose->callback([&] {
    AdTree tree = load_adtree(tree_file);
    PatternChoice choice;
    if (!choices_file.empty() && fs::exists(choices_file))
      choice = load_pattern_choice(choices_file);
    std::size_t known = choice.selections.size();
    choice = prompt_missing(tree, std::move(choice));
    fs::path choice_path =
        choices_file.empty() ? fs::path(out_dir) / "choices.csv" : fs::path(choices_file);
    if (choice.selections.size() != known || !fs::exists(choice_path)) {
      if (!choice_path.parent_path().empty()) fs::create_directories(choice_path.parent_path());
      save_pattern_choice(choice, choice_path);
      std::cout << "wrote " << choice_path.string() << "\n";
    }
    AdTree final_tree = choose_patterns(tree, choice);
    fs::path path = fs::path(out_dir) / (fs::path(tree_file).stem().string() + "-final.xml");
    write_text(path, serialize_adtree(final_tree));
    std::cout << "wrote " << path.string() << "\n";
  });

  CLI::App* tree_expand = tree_cmd->add_subcommand(
      "expand", "expand every attack leaf of an initial tree into its resolved subtree");
  tree_expand->add_option("initial", tree_file, "initial tree XML")->required();
  add_kb(tree_expand);
  tree_expand->add_option("--choices", choices_file, "pattern choice file");
  tree_expand->add_option("--out", out_dir, "output directory (default: out)");
  tree_expand->callback([&] {
    KnowledgeBase kb = load_kb(kb_dir);
    AdTree initial = load_adtree(tree_file);
    PatternChoice choice;
    if (!choices_file.empty()) choice = load_pattern_choice(choices_file);
    std::vector<std::string> warnings;
    AdTree tf = expand(initial, kb, choice, &warnings);
    print_warnings(warnings);
    fs::path path = fs::path(out_dir) / (fs::path(tree_file).stem().string() + "-final.xml");
    write_text(path, serialize_adtree(tf));
    std::cout << "wrote " << path.string() << "\n";
    ArchitectureReport report = build_report(tf, kb);
    fs::path report_path = fs::path(out_dir) / "architecture.csv";
    save_csv(report.to_table(), report_path);
    std::cout << "wrote " << report_path.string() << "\n";
  });

  CLI::App* scenarios_cmd =
      app.add_subcommand("scenarios", "list the attack-defense scenarios of a final tree");
  scenarios_cmd->add_option("tree", tree_file, "final tree XML")->required();
  scenarios_cmd->add_option("--max-scenarios", max_scenarios, "scenario ceiling");
  scenarios_cmd->callback([&] {
    AdTree tree = load_adtree(tree_file);
    std::vector<Scenario> scenarios = extract_scenarios(to_adterm(tree), max_scenarios);
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      std::string steps;
      for (const std::string& s : scenarios[i].step_labels()) {
        if (!steps.empty()) steps += scenarios[i].ordered ? " -> " : " & ";
        steps += s;
      }
      std::cout << "scenario " << i + 1 << ": " << steps << "\n";
    }
    std::cout << scenarios.size() << " scenarios\n";
  });

  CLI::App* testgen_cmd =
      app.add_subcommand("testgen", "emit the GWT test suite of a final tree");
  testgen_cmd->add_option("tree", tree_file, "final tree XML")->required();
  add_kb(testgen_cmd);
  add_common(testgen_cmd);
  testgen_cmd->add_option("--max-scenarios", max_scenarios, "scenario ceiling");
  testgen_cmd->callback([&] {
    KnowledgeBase kb = load_kb(kb_dir);
    AdTree tree = load_adtree(tree_file);
    TestSuite suite = rebuild_suite(tree, kb, context, max_scenarios);
    print_warnings(suite.warnings);
    for (const fs::path& p : write_test_suite(suite, out_dir))
      std::cout << "wrote " << p.string() << "\n";
    std::cout << suite.cases.size() << " test cases across " << suite.features.size()
              << " features\n";
  });

  CLI::App* verdicts_cmd = app.add_subcommand("verdicts", "test verdict operations");
  verdicts_cmd->require_subcommand(1);
  CLI::App* verdicts_ingest = verdicts_cmd->add_subcommand(
      "ingest", "read a results file and evaluate the security predicates");
  verdicts_ingest->add_option("tree", tree_file, "final tree XML")->required();
  add_kb(verdicts_ingest);
  add_common(verdicts_ingest);
  verdicts_ingest->add_option("--results", results_file, "results file (case-id, verdict)")
      ->required();
  verdicts_ingest->add_option("--max-scenarios", max_scenarios, "scenario ceiling");
  verdicts_ingest->callback([&] {
    KnowledgeBase kb = load_kb(kb_dir);
    AdTree tree = load_adtree(tree_file);
    SecurityReport report = run_security(tree, kb, context, results_file, max_scenarios);
    write_text(fs::path(out_dir) / "security-report.txt", security_report_text(report));
    write_text(fs::path(out_dir) / "security-report.json",
               security_report_json(report).dump(2) + "\n");
    std::cout << security_report_text(report);
    std::cout << "wrote " << (fs::path(out_dir) / "security-report.txt").string() << "\n";
    std::cout << "wrote " << (fs::path(out_dir) / "security-report.json").string() << "\n";
  });

  CLI::App* ltl_cmd = app.add_subcommand("ltl", "LTL property operations");
  ltl_cmd->require_subcommand(1);
  CLI::App* ltl_gen =
      ltl_cmd->add_subcommand("gen", "generate the LTL properties of a security pattern");
  ltl_gen->add_option("pattern", pattern_id, "security pattern id")->required();
  add_kb(ltl_gen);
  add_common(ltl_gen);
  ltl_gen->callback([&] {
    KnowledgeBase kb = load_kb(kb_dir);
    std::vector<std::string> warnings;
    std::vector<LtlFormula> properties =
        pattern_properties(kb, pattern_id, context, &warnings);
    print_warnings(warnings);
    for (const LtlFormula& p : properties) std::cout << to_string(p) << "\n";
    std::cout << properties.size() << " properties\n";
    fs::path path = fs::path(out_dir) / (slug(pattern_id) + "-" + slug(context) + ".ltl");
    write_text(path, emit_property_lines(properties));
    std::cout << "wrote " << path.string() << "\n";
  });

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check pattern LTL properties against collected traces");
  verify_cmd->add_option("tree", tree_file, "final tree XML")->required();
  add_kb(verify_cmd);
  add_common(verify_cmd);
  verify_cmd->add_option("--traces", traces_dir, "trace log directory")->required();
  verify_cmd->callback([&] {
    KnowledgeBase kb = load_kb(kb_dir);
    AdTree tree = load_adtree(tree_file);
    GlobalVerdict verdict = run_verify(tree, kb, context, traces_dir);
    write_text(fs::path(out_dir) / "pattern-report.txt", pattern_report_text(verdict));
    write_text(fs::path(out_dir) / "pattern-report.json",
               pattern_report_json(verdict).dump(2) + "\n");
    std::cout << pattern_report_text(verdict);
    std::cout << "wrote " << (fs::path(out_dir) / "pattern-report.txt").string() << "\n";
    std::cout << "wrote " << (fs::path(out_dir) / "pattern-report.json").string() << "\n";
  });

  CLI::App* report_cmd = app.add_subcommand(
      "report", "combine security testing and pattern verification into one report");
  report_cmd->add_option("tree", tree_file, "final tree XML")->required();
  add_kb(report_cmd);
  add_common(report_cmd);
  report_cmd->add_option("--results", results_file, "results file (case-id, verdict)")
      ->required();
  report_cmd->add_option("--traces", traces_dir, "trace log directory")->required();
  report_cmd->add_option("--max-scenarios", max_scenarios, "scenario ceiling");
  report_cmd->callback([&] {
    KnowledgeBase kb = load_kb(kb_dir);
    AdTree tree = load_adtree(tree_file);
    SecurityReport security = run_security(tree, kb, context, results_file, max_scenarios);
    GlobalVerdict patterns = run_verify(tree, kb, context, traces_dir);
    CombinedReport combined = combine(std::move(security), std::move(patterns));
    write_text(fs::path(out_dir) / "report.txt", combined_report_text(combined));
    write_text(fs::path(out_dir) / "report.json",
               combined_report_json(combined).dump(2) + "\n");
    std::cout << combined_report_text(combined);
    std::cout << "wrote " << (fs::path(out_dir) / "report.txt").string() << "\n";
    std::cout << "wrote " << (fs::path(out_dir) / "report.json").string() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

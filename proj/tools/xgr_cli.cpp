// xgr: goal recognition with why / why-not explanations.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "xgr/xgr.hpp"

namespace {

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return 2;
  }
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal recognition with weight-of-evidence explanations"};
  app.require_subcommand(1);

  std::string scenario_path, question = "why", goal, format = "text", priors_path, out_path,
                             annotation_path, dir;
  std::size_t budget = xgr::kDefaultExpansionBudget;

  auto common = [&](CLI::App* sub, bool needs_scenario) {
    auto* opt = sub->add_option("--scenario", scenario_path, "scenario JSON file");
    if (needs_scenario) opt->required();
    sub->add_option("--format", format, "text | structured | ascii-grid")
        ->check(CLI::IsMember({"text", "structured", "ascii-grid"}));
    sub->add_option("--priors", priors_path, "goal priors JSON (list or label -> weight)");
    sub->add_option("--budget", budget, "planner node-expansion budget");
    sub->add_option("--out", out_path, "write output to this file");
  };

  auto* recognize = app.add_subcommand("recognize", "posterior over goals per observation prefix");
  common(recognize, true);
  auto* explain = app.add_subcommand("explain", "answer a why / why-not question");
  common(explain, true);
  explain->add_option("--question", question, "why | whynot")
      ->check(CLI::IsMember({"why", "whynot", "why-not"}));
  explain->add_option("--goal", goal, "goal label or 1-based index");
  auto* rank = app.add_subcommand("rank", "rank observations for why and why-not");
  common(rank, true);
  auto* bench = app.add_subcommand("bench", "time recognition and explanation over a directory");
  common(bench, false);
  bench->add_option("--dir", dir, "directory of scenario files")->required();
  auto* eval = app.add_subcommand("eval", "compare model explanations with annotations");
  common(eval, true);
  eval->add_option("--annotation", annotation_path, "annotation JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    xgr::CommandOptions options;
    options.format = xgr::parse_format(format);
    options.question = xgr::parse_question(question);
    if (!goal.empty()) options.goal = goal;
    options.planner.expansion_budget = budget;

    if (bench->parsed()) return emit(xgr::cmd_bench(dir, options), out_path);

    const auto loaded = xgr::load_scenario(scenario_path);
    for (const auto& w : loaded.compiled.warnings) std::cerr << "warning: " << w << "\n";
    if (!priors_path.empty()) {
      options.priors = xgr::load_priors(priors_path, loaded.problem.goal_labels);
    }

    std::string text;
    if (recognize->parsed()) {
      text = xgr::cmd_recognize(loaded, options);
    } else if (explain->parsed()) {
      text = xgr::cmd_explain(loaded, options);
    } else if (rank->parsed()) {
      text = xgr::cmd_rank(loaded, options);
    } else {
      text = xgr::cmd_eval(loaded, xgr::load_annotation(annotation_path), options);
    }
    return emit(text, out_path);
  } catch (const xgr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return xgr::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#pragma once

// Command implementations behind the CLI. Each command builds a structured
// (JSON) result first; the plain-text view is rendered from that JSON alone,
// so both formats always agree.

#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xgr/bench.hpp"
#include "xgr/error.hpp"
#include "xgr/explainer.hpp"
#include "xgr/metrics.hpp"
#include "xgr/recognizer.hpp"
#include "xgr/scenario.hpp"

namespace xgr {

enum class OutputFormat { kText, kStructured, kAsciiGrid };
enum class Question { kWhy, kWhyNot };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "text") return OutputFormat::kText;
  if (s == "structured") return OutputFormat::kStructured;
  if (s == "ascii-grid") return OutputFormat::kAsciiGrid;
  throw Error(ErrorCode::kValidationError, "unknown format '" + s + "'");
}

inline Question parse_question(const std::string& s) {
  if (s == "why") return Question::kWhy;
  if (s == "whynot" || s == "why-not") return Question::kWhyNot;
  throw Error(ErrorCode::kValidationError, "unknown question '" + s + "' (use why or whynot)");
}

/// 0 success, 2 bad input, 3 planner budget exhausted, 1 anything else.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBudgetExceeded: return 3;
    case ErrorCode::kParseError:
    case ErrorCode::kValidationError:
    case ErrorCode::kMalformedDomain:
    case ErrorCode::kMalformedSpec:
    case ErrorCode::kInvalidObservationChain:
    case ErrorCode::kNotAdjacent:
    case ErrorCode::kNotApplicable:
    case ErrorCode::kInvalidHeuristic:
    case ErrorCode::kMissingAnnotation:
    case ErrorCode::kKeyMismatch:
    case ErrorCode::kZeroPrior:
    case ErrorCode::kEmptyCounterfactualSet: return 2;
    default: return 1;
  }
}

struct CommandOptions {
  OutputFormat format = OutputFormat::kText;
  Question question = Question::kWhy;
  /// Goal label ("g2") or 1-based index ("2").
  std::optional<std::string> goal;
  std::vector<double> priors;
  PlannerOptions planner;
};

inline std::size_t resolve_goal(const GrProblem& problem, const std::string& token) {
  for (std::size_t g = 0; g < problem.goal_count(); ++g) {
    if (problem.label(g) == token) return g;
  }
  if (!token.empty() && std::all_of(token.begin(), token.end(), ::isdigit)) {
    const auto i = std::stoul(token);
    if (i >= 1 && i <= problem.goal_count()) return i - 1;
  }
  throw Error(ErrorCode::kValidationError, "unknown goal '" + token + "'");
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline Json labels_json(const GrProblem& p, const std::vector<std::size_t>& goals) {
  Json out = Json::array();
  for (std::size_t g : goals) out.push_back(p.label(g));
  return out;
}

inline std::string join_labels(const Json& labels) {
  std::string out;
  for (const auto& l : labels) out += (out.empty() ? "" : ", ") + l.get<std::string>();
  return out.empty() ? "(none)" : out;
}

inline Json entry_json(const GrProblem& p, const ExplananEntry& e) {
  return {{"predicted", p.label(e.predicted_goal)},
          {"counterfactual", p.label(e.counterfactual_goal)},
          {"observation", e.observation},
          {"action", p.domain->action(p.observations.at(e.observation - 1).action).name},
          {"woe", e.woe}};
}

inline Json entries_json(const GrProblem& p, const std::vector<ExplananEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) out.push_back(entry_json(p, e));
  return out;
}

inline std::string entry_text(const Json& e) {
  return "o" + std::to_string(e["observation"].get<std::size_t>()) + " " +
         e["action"].get<std::string>() + " (" + e["predicted"].get<std::string>() + " vs " +
         e["counterfactual"].get<std::string>() + ", WoE " + format_woe(e["woe"].get<double>()) + ")";
}

inline std::string status_name(CounterfactualAction::Status s) {
  switch (s) {
    case CounterfactualAction::Status::kAction: return "action";
    case CounterfactualAction::Status::kAlreadyReached: return "already-reached";
    case CounterfactualAction::Status::kUnsolvable: return "unsolvable";
  }
  return "unsolvable";
}

inline std::string counterfactual_name(const GrProblem& p, const CounterfactualAction& a) {
  return a.action ? p.domain->action(*a.action).name : status_name(a.status);
}

struct Analysis {
  PosteriorTrace trace;
  CompleteExplanan explanan;
};

inline Analysis analyse(const GrProblem& problem, const CommandOptions& options) {
  MirrorOptions mirror;
  mirror.planner = options.planner;
  mirror.priors = options.priors;
  Analysis a;
  a.trace = mirror_posteriors(problem, mirror);
  a.explanan = build_explanan(a.trace);
  return a;
}

// --- ascii-grid -------------------------------------------------------------

inline char arrow(Direction d) {
  switch (d) {
    case Direction::kUp: return '^';
    case Direction::kDown: return 'v';
    case Direction::kLeft: return '<';
    case Direction::kRight: return '>';
  }
  return '?';
}

/// Board with observation arrows on each move's origin cell; `highlights`
/// maps observation index to a marker glyph drawn instead of the arrow.
inline std::string ascii_board(const LoadedScenario& loaded,
                               const std::map<std::size_t, char>& highlights) {
  const auto& s = loaded.scenario;
  if (s.kind == DomainKind::kStrips) {
    throw Error(ErrorCode::kValidationError,
                "ascii-grid output needs a grid or Sokoban scenario");
  }
  const GridGeometry geo = loaded.compiled.geometry;
  std::vector<char> board(static_cast<std::size_t>(geo.cell_count()), '.');
  auto at = [&](int cell) -> char& { return board[static_cast<std::size_t>(cell - 1)]; };
  if (const auto* g = std::get_if<GridSpec>(&s.spec)) {
    for (int b : g->blocked) at(b) = '#';
    at(g->start) = '@';
    for (std::size_t i = 0; i < g->goal_cells.size(); ++i) {
      at(g->goal_cells[i]) = static_cast<char>('1' + i % 9);
    }
  } else {
    const auto& k = std::get<SokobanSpec>(s.spec);
    for (int w : k.walls) at(w) = '#';
    for (std::size_t i = 0; i < k.storage.size(); ++i) at(k.storage[i]) = static_cast<char>('1' + i % 9);
    for (int b : k.boxes) at(b) = '$';
    at(k.player) = '@';
  }
  const auto& p = loaded.problem;
  for (std::size_t i = 1; i <= p.observation_count(); ++i) {
    const CellMove* m = p.move(p.observations[i - 1].action);
    if (!m) continue;
    auto h = highlights.find(i);
    at(m->from) = h != highlights.end() ? h->second : arrow(m->direction);
  }
  std::string out;
  for (int r = 0; r < geo.height; ++r) {
    out.append(board.begin() + r * geo.width, board.begin() + (r + 1) * geo.width);
    out += '\n';
  }
  out += "legend: # wall, @ start, digits goals/storage, $ box, ^v<> observed moves";
  if (!highlights.empty()) out += ", * marker, ? counterfactual marker";
  return out + "\n";
}

}  // namespace detail

// --- recognize ----------------------------------------------------------------

inline Json recognize_json(const LoadedScenario& loaded, const PosteriorTrace& trace) {
  const auto& p = loaded.problem;
  Json j;
  j["scenario"] = loaded.scenario.name;
  j["goals"] = p.goal_labels;
  Json costs = Json::array();
  for (const auto& c : trace.optimal_costs) costs.push_back(c ? Json(*c) : Json(nullptr));
  j["optimal_costs"] = costs;
  Json rows = Json::array();
  for (std::size_t i = 0; i < trace.per_prefix.size(); ++i) {
    Json row;
    row["prefix"] = i;
    row["action"] = i == 0 ? Json(nullptr) : Json(p.domain->action(p.observations[i - 1].action).name);
    row["posteriors"] = trace.per_prefix[i];
    rows.push_back(row);
  }
  j["per_prefix"] = rows;
  j["predicted"] = detail::labels_json(p, trace.predicted);
  j["counterfactual"] = detail::labels_json(p, trace.counterfactual);
  j["warnings"] = loaded.compiled.warnings;
  return j;
}

inline std::string recognize_text(const Json& j) {
  std::string out = "Posterior P(g | O_i) for " + j["scenario"].get<std::string>() + "\n";
  out += detail::pad("prefix", 8) + detail::pad("action", 28);
  for (const auto& g : j["goals"]) out += detail::pad(g.get<std::string>(), 9);
  out += "\n";
  for (const auto& row : j["per_prefix"]) {
    const auto i = row["prefix"].get<std::size_t>();
    out += detail::pad(i == 0 ? "-" : "o" + std::to_string(i), 8);
    out += detail::pad(row["action"].is_null() ? "(none)" : row["action"].get<std::string>(), 28);
    for (const auto& v : row["posteriors"]) out += detail::pad(detail::fixed(v.get<double>(), 4), 9);
    out += "\n";
  }
  out += "predicted: " + detail::join_labels(j["predicted"]) +
         "\ncounterfactual: " + detail::join_labels(j["counterfactual"]) + "\n";
  for (const auto& w : j["warnings"]) out += "warning: " + w.get<std::string>() + "\n";
  return out;
}

inline std::string cmd_recognize(const LoadedScenario& loaded, const CommandOptions& options) {
  const auto analysis = detail::analyse(loaded.problem, options);
  const Json j = recognize_json(loaded, analysis.trace);
  switch (options.format) {
    case OutputFormat::kStructured: return j.dump(2) + "\n";
    case OutputFormat::kAsciiGrid: return detail::ascii_board(loaded, {}) + recognize_text(j);
    case OutputFormat::kText: break;
  }
  return recognize_text(j);
}

// --- explain ------------------------------------------------------------------

inline Json explain_json(const LoadedScenario& loaded, const CommandOptions& options) {
  const auto& p = loaded.problem;
  const auto analysis = detail::analyse(p, options);
  const auto& ex = analysis.explanan;
  std::optional<std::size_t> goal;
  if (options.goal) goal = resolve_goal(p, *options.goal);

  Json j;
  j["scenario"] = loaded.scenario.name;
  j["question"] = options.question == Question::kWhy ? "why" : "whynot";
  j["goal"] = goal ? Json(p.label(*goal)) : Json(nullptr);
  j["predicted"] = detail::labels_json(p, ex.predicted);
  j["counterfactual"] = detail::labels_json(p, ex.counterfactual);
  j["entries"] = detail::entries_json(p, ex.entries);
  j["excluded_observations"] = ex.non_discriminative_observations();

  if (options.question == Question::kWhy) {
    if (goal && std::find(ex.predicted.begin(), ex.predicted.end(), *goal) == ex.predicted.end()) {
      throw Error(ErrorCode::kValidationError,
                  "goal " + p.label(*goal) + " is not a predicted goal; ask why-not instead");
    }
    const WhyAnswer answer = explain_why(p, ex, goal);
    j["markers"] = detail::entries_json(p, answer.markers);
    j["pair_maxima"] = detail::entries_json(p, answer.pair_maxima);
    j["rendered"] = answer.rendered;
  } else {
    ExplainOptions eo;
    eo.planner = options.planner;
    const WhyNotAnswer answer = explain_why_not(p, ex, goal, eo);
    Json groups = Json::array();
    for (const auto& m : answer.markers) {
      Json group;
      group["goal"] = p.label(m.goal);
      group["entries"] = detail::entries_json(p, m.entries);
      Json actions = Json::array();
      for (const auto& a : answer.counterfactual_actions) {
        if (a.goal != m.goal) continue;
        Json plan = Json::array();
        for (ActionId id : a.plan.actions) plan.push_back(p.domain->action(id).name);
        actions.push_back({{"observation", a.observation},
                           {"status", detail::status_name(a.status)},
                           {"action", a.action ? Json(p.domain->action(*a.action).name) : Json(nullptr)},
                           {"plan", plan}});
      }
      group["counterfactual_actions"] = actions;
      groups.push_back(group);
    }
    j["markers"] = groups;
    j["unexplained_goals"] = detail::labels_json(p, answer.unexplained_goals);
    j["rendered"] = answer.rendered;
  }
  return j;
}

inline std::string explain_text(const Json& j) {
  std::string out = j["rendered"].get<std::string>() + "\n\n";
  out += "predicted: " + detail::join_labels(j["predicted"]) +
         "; counterfactual: " + detail::join_labels(j["counterfactual"]) + "\n";
  out += "WoE entries:\n";
  for (const auto& e : j["entries"]) out += "  " + detail::entry_text(e) + "\n";
  if (!j["excluded_observations"].empty()) {
    out += "no evidence:";
    for (const auto& i : j["excluded_observations"]) out += " o" + std::to_string(i.get<std::size_t>());
    out += "\n";
  }
  if (j["question"] == "why") {
    out += "observational markers:\n";
    for (const auto& e : j["markers"]) out += "  " + detail::entry_text(e) + "\n";
  } else {
    out += "counterfactual markers:\n";
    for (const auto& g : j["markers"]) {
      for (const auto& e : g["entries"]) out += "  " + g["goal"].get<std::string>() + ": " + detail::entry_text(e) + "\n";
      for (const auto& a : g["counterfactual_actions"]) {
        out += "    would instead: " +
               (a["action"].is_null() ? a["status"].get<std::string>() : a["action"].get<std::string>()) +
               "\n";
      }
    }
    for (const auto& g : j["unexplained_goals"]) {
      out += "  " + g.get<std::string>() + ": no entries (ruled out)\n";
    }
  }
  return out;
}

inline std::string cmd_explain(const LoadedScenario& loaded, const CommandOptions& options) {
  const Json j = explain_json(loaded, options);
  switch (options.format) {
    case OutputFormat::kStructured: return j.dump(2) + "\n";
    case OutputFormat::kAsciiGrid: {
      std::map<std::size_t, char> highlights;
      if (j["question"] == "why") {
        for (const auto& e : j["markers"]) highlights[e["observation"].get<std::size_t>()] = '*';
      } else {
        for (const auto& g : j["markers"]) {
          for (const auto& e : g["entries"]) highlights[e["observation"].get<std::size_t>()] = '?';
        }
      }
      return detail::ascii_board(loaded, highlights) + explain_text(j);
    }
    case OutputFormat::kText: break;
  }
  return explain_text(j);
}

// --- rank ---------------------------------------------------------------------

inline Json rank_json(const LoadedScenario& loaded, const RankTable& table) {
  const auto& p = loaded.problem;
  Json rows = Json::array();
  for (std::size_t i = 0; i < p.observation_count(); ++i) {
    rows.push_back({{"observation", i + 1},
                    {"action", p.domain->action(p.observations[i].action).name},
                    {"why_rank", table.why[i]},
                    {"whynot_rank", table.whynot[i]},
                    {"why_woe", table.why_woe[i] ? Json(*table.why_woe[i]) : Json(nullptr)},
                    {"whynot_woe", table.whynot_woe[i] ? Json(*table.whynot_woe[i]) : Json(nullptr)}});
  }
  return {{"scenario", loaded.scenario.name}, {"observations", rows}};
}

inline std::string rank_text(const Json& j) {
  std::string out = detail::pad("obs", 6) + detail::pad("action", 34) + detail::pad("why", 6) +
                    detail::pad("whynot", 8) + "WoE (max / min)\n";
  for (const auto& r : j["observations"]) {
    out += detail::pad("o" + std::to_string(r["observation"].get<std::size_t>()), 6);
    out += detail::pad(r["action"].get<std::string>(), 34);
    out += detail::pad(std::to_string(r["why_rank"].get<int>()), 6);
    out += detail::pad(std::to_string(r["whynot_rank"].get<int>()), 8);
    out += r["why_woe"].is_null() ? "-" : format_woe(r["why_woe"].get<double>()) + " / " +
                                              format_woe(r["whynot_woe"].get<double>());
    out += "\n";
  }
  return out;
}

inline std::string cmd_rank(const LoadedScenario& loaded, const CommandOptions& options) {
  const auto analysis = detail::analyse(loaded.problem, options);
  const Json j = rank_json(loaded, rank_observations(analysis.explanan));
  switch (options.format) {
    case OutputFormat::kStructured: return j.dump(2) + "\n";
    case OutputFormat::kAsciiGrid: {
      std::map<std::size_t, char> highlights;
      for (const auto& r : j["observations"]) {
        if (r["why_rank"] == 1) highlights[r["observation"].get<std::size_t>()] = '*';
        if (r["whynot_rank"] == 1) highlights[r["observation"].get<std::size_t>()] = '?';
      }
      return detail::ascii_board(loaded, highlights) + rank_text(j);
    }
    case OutputFormat::kText: break;
  }
  return rank_text(j);
}

// --- bench --------------------------------------------------------------------

inline Json bench_json(const BenchResult& r) {
  Json reports = Json::array();
  for (const auto& t : r.reports) {
    reports.push_back({{"domain", t.group},
                       {"scenarios", t.scenarios},
                       {"total_with_xgr", {{"mean", t.total_with_xgr.mean}, {"sd", t.total_with_xgr.sd}}},
                       {"xgr_only", {{"mean", t.xgr_only.mean}, {"sd", t.xgr_only.sd}}},
                       {"time_increase_pct", t.time_increase_pct},
                       {"counterfactual_planning_pct", t.counterfactual_planning_pct}});
  }
  Json runs = Json::array();
  for (const auto& s : r.runs) {
    Json run{{"name", s.name}, {"file", s.file}, {"domain", s.group}, {"ok", s.ok}};
    if (s.ok) {
      run["total_with_xgr"] = s.total_seconds;
      run["xgr_only"] = s.xgr_seconds;
      run["counterfactual_planning"] = s.counterfactual_seconds;
    } else {
      run["error"] = s.error;
    }
    runs.push_back(run);
  }
  return {{"reports", reports}, {"runs", runs}, {"wall_seconds", r.wall_seconds}};
}

inline std::string bench_text(const Json& j) {
  auto ms = [](const Json& v) {
    return detail::fixed(v["mean"].get<double>(), 4) + " (" + detail::fixed(v["sd"].get<double>(), 4) + ")";
  };
  std::string out = detail::pad("Domain", 12) + detail::pad("N", 4) +
                    detail::pad("Mirroring with XGR (s)", 26) + detail::pad("XGR only (s)", 22) +
                    detail::pad("Time increase (%)", 20) + "Counterfactual planning (%)\n";
  for (const auto& t : j["reports"]) {
    out += detail::pad(t["domain"].get<std::string>(), 12);
    out += detail::pad(std::to_string(t["scenarios"].get<std::size_t>()), 4);
    out += detail::pad(ms(t["total_with_xgr"]), 26);
    out += detail::pad(ms(t["xgr_only"]), 22);
    out += detail::pad(detail::fixed(t["time_increase_pct"].get<double>(), 1), 20);
    out += detail::fixed(t["counterfactual_planning_pct"].get<double>(), 1) + "\n";
  }
  for (const auto& run : j["runs"]) {
    if (!run["ok"].get<bool>()) {
      out += "failed: " + run["file"].get<std::string>() + ": " + run["error"].get<std::string>() + "\n";
    }
  }
  out += "wall time: " + detail::fixed(j["wall_seconds"].get<double>(), 2) + " s\n";
  return out;
}

inline std::string cmd_bench(const std::string& dir, const CommandOptions& options) {
  BenchOptions bo;
  bo.planner = options.planner;
  const Json j = bench_json(run_bench(dir, bo));
  return options.format == OutputFormat::kStructured ? j.dump(2) + "\n" : bench_text(j);
}

// --- eval ---------------------------------------------------------------------

/// Model counterfactual action per counterfactual goal label, taken at the
/// earliest counterfactual marker.
inline std::map<std::string, std::string> model_counterfactual_actions(
    const GrProblem& problem, const CompleteExplanan& ex, const PlannerOptions& planner = {}) {
  std::map<std::string, std::string> out;
  if (ex.empty_counterfactual_set) return out;
  ExplainOptions eo;
  eo.planner = planner;
  const WhyNotAnswer answer = explain_why_not(problem, ex, std::nullopt, eo);
  for (const auto& a : answer.counterfactual_actions) {
    out.try_emplace(problem.label(a.goal), detail::counterfactual_name(problem, a));
  }
  for (std::size_t g : answer.unexplained_goals) out.try_emplace(problem.label(g), "unsolvable");
  return out;
}

inline Json eval_json(const LoadedScenario& loaded, const Annotation& annotation,
                      const CommandOptions& options) {
  const auto& p = loaded.problem;
  const auto analysis = detail::analyse(p, options);
  const RankTable table = rank_observations(analysis.explanan);
  auto as_map = [](const std::vector<int>& ranks) {
    std::map<std::size_t, int> m;
    for (std::size_t i = 0; i < ranks.size(); ++i) m[i + 1] = ranks[i];
    return m;
  };
  const std::size_t n = p.observation_count();
  Json j{{"scenario", loaded.scenario.name}, {"observations", n}};
  j["mae_why"] = annotation.why_ranks.empty()
                     ? Json(nullptr)
                     : Json(eval_mae(as_map(table.why), annotation.why_ranks, n));
  j["mae_whynot"] = annotation.whynot_ranks.empty()
                        ? Json(nullptr)
                        : Json(eval_mae(as_map(table.whynot), annotation.whynot_ranks, n));
  if (annotation.counterfactual_actions.empty()) {
    j["cf_agreement_pct"] = nullptr;
  } else {
    const auto model = model_counterfactual_actions(p, analysis.explanan, options.planner);
    j["model_counterfactual_actions"] = model;
    j["cf_agreement_pct"] = eval_cf_agreement(model, annotation.counterfactual_actions);
  }
  return j;
}

inline std::string eval_text(const Json& j) {
  auto show = [](const Json& v, int digits) {
    return v.is_null() ? std::string("n/a") : detail::fixed(v.get<double>(), digits);
  };
  return "scenario: " + j["scenario"].get<std::string>() + "\nMAE why: " + show(j["mae_why"], 2) +
         "\nMAE why-not: " + show(j["mae_whynot"], 2) +
         "\nCF agreement (%): " + show(j["cf_agreement_pct"], 1) + "\n";
}

inline std::string cmd_eval(const LoadedScenario& loaded, const Annotation& annotation,
                            const CommandOptions& options) {
  const Json j = eval_json(loaded, annotation, options);
  return options.format == OutputFormat::kStructured ? j.dump(2) + "\n" : eval_text(j);
}

}  // namespace xgr

#pragma once

// Weight-of-evidence explanations for goal recognition output.
//
// Given a posterior trace, every (predicted, counterfactual) goal pair gets a
// WoE value per observation prefix. "Why g?" is answered by the observation(s)
// with the highest WoE (observational markers), "why not g'?" by those with
// the lowest WoE against g' together with the first action of an optimal plan
// to g' from the state preceding that observation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xgr/domains.hpp"
#include "xgr/error.hpp"
#include "xgr/planner.hpp"
#include "xgr/recognizer.hpp"
#include "xgr/strips.hpp"

namespace xgr {

/// Natural-log posterior ratio; assumes uniform priors.
inline double woe_uniform(double p, double p_prime) {
  if (!(p > 0.0) || !(p_prime > 0.0)) {
    throw Error(ErrorCode::kZeroPosterior, "weight of evidence needs positive posteriors");
  }
  return std::log(p / p_prime);
}

/// Log posterior ratio minus log prior ratio.
inline double woe_with_priors(double p, double p_prime, double prior, double prior_prime) {
  if (!(prior > 0.0) || !(prior_prime > 0.0)) {
    throw Error(ErrorCode::kZeroPrior, "weight of evidence needs positive priors");
  }
  const double posterior_term = woe_uniform(p, p_prime);
  if (prior == prior_prime) return posterior_term;
  return posterior_term - std::log(prior / prior_prime);
}

struct ExplananEntry {
  std::size_t predicted_goal = 0;
  std::size_t counterfactual_goal = 0;
  /// 1-based: the entry belongs to the prefix ending at this observation.
  std::size_t observation = 0;
  double woe = 0.0;

  friend bool operator==(const ExplananEntry&, const ExplananEntry&) = default;
};

struct ExcludedEntry {
  enum class Reason { kZeroPosterior, kTied };

  std::size_t predicted_goal = 0;
  std::size_t counterfactual_goal = 0;
  std::size_t observation = 0;
  Reason reason = Reason::kTied;
};

struct CompleteExplanan {
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> counterfactual;
  std::size_t observation_count = 0;
  /// Grouped by (g, g') pair in predicted x counterfactual order, then by
  /// observation index.
  std::vector<ExplananEntry> entries;
  std::vector<ExcludedEntry> excluded;
  /// Set when there was no counterfactual goal to contrast against.
  bool empty_counterfactual_set = false;

  bool empty() const { return entries.empty(); }

  std::vector<ExplananEntry> entries_for(std::size_t g, std::size_t g_prime) const {
    std::vector<ExplananEntry> out;
    for (const auto& e : entries) {
      if (e.predicted_goal == g && e.counterfactual_goal == g_prime) out.push_back(e);
    }
    return out;
  }

  /// Observations that produced no entry at all.
  std::vector<std::size_t> non_discriminative_observations() const {
    std::set<std::size_t> with_entries;
    for (const auto& e : entries) with_entries.insert(e.observation);
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i <= observation_count; ++i) {
      if (!with_entries.contains(i)) out.push_back(i);
    }
    return out;
  }
};

/// Explanan from already-computed entries (e.g. hand-entered lists).
inline CompleteExplanan make_explanan(std::vector<ExplananEntry> entries,
                                      std::size_t observation_count) {
  CompleteExplanan ex;
  ex.observation_count = observation_count;
  std::set<std::size_t> gp, gc;
  for (const auto& e : entries) {
    gp.insert(e.predicted_goal);
    gc.insert(e.counterfactual_goal);
  }
  ex.predicted.assign(gp.begin(), gp.end());
  ex.counterfactual.assign(gc.begin(), gc.end());
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.predicted_goal != b.predicted_goal) return a.predicted_goal < b.predicted_goal;
    if (a.counterfactual_goal != b.counterfactual_goal) {
      return a.counterfactual_goal < b.counterfactual_goal;
    }
    return a.observation < b.observation;
  });
  ex.entries = std::move(entries);
  return ex;
}

struct ExplananOptions {
  /// |woe| at or below this marks a tied pair, which carries no evidence.
  double tie_tolerance = kDefaultTieTolerance;
};

/// Entry (g, g', i) exists iff both posteriors at prefix i are positive and
/// the pair is not tied there.
inline CompleteExplanan build_explanan(const PosteriorTrace& trace,
                                       const ExplananOptions& options = {}) {
  CompleteExplanan ex;
  ex.predicted = trace.predicted;
  ex.counterfactual = trace.counterfactual;
  ex.observation_count = trace.observation_count();
  if (trace.counterfactual.empty()) {
    ex.empty_counterfactual_set = true;
    return ex;
  }
  const bool uniform = trace.priors.empty();
  for (std::size_t g : trace.predicted) {
    for (std::size_t gc : trace.counterfactual) {
      for (std::size_t i = 1; i <= ex.observation_count; ++i) {
        const double p = trace.per_prefix[i][g];
        const double pc = trace.per_prefix[i][gc];
        if (!(p > 0.0) || !(pc > 0.0)) {
          ex.excluded.push_back({g, gc, i, ExcludedEntry::Reason::kZeroPosterior});
          continue;
        }
        const double w = uniform ? woe_uniform(p, pc)
                                 : woe_with_priors(p, pc, trace.priors[g], trace.priors[gc]);
        if (std::abs(w) <= options.tie_tolerance) {
          ex.excluded.push_back({g, gc, i, ExcludedEntry::Reason::kTied});
          continue;
        }
        ex.entries.push_back({g, gc, i, w});
      }
    }
  }
  return ex;
}

namespace detail {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline void require_entries(const CompleteExplanan& ex) {
  if (ex.empty_counterfactual_set) {
    throw Error(ErrorCode::kEmptyCounterfactualSet, "no counterfactual goal to contrast against");
  }
  if (ex.entries.empty()) throw Error(ErrorCode::kEmptyExplanan, "explanan has no entries");
}

}  // namespace detail

struct WhyAnswer {
  /// Maximum-WoE entries per (g, g') pair, ties retained.
  std::vector<ExplananEntry> pair_maxima;
  /// Entries attaining the overall maximum: the observational markers.
  std::vector<ExplananEntry> markers;
  std::string rendered;
};

/// Observational markers, optionally restricted to one predicted goal.
inline WhyAnswer select_om(const CompleteExplanan& ex,
                           std::optional<std::size_t> predicted_goal = std::nullopt,
                           double tie_tolerance = kDefaultTieTolerance) {
  detail::require_entries(ex);
  WhyAnswer answer;
  std::map<std::pair<std::size_t, std::size_t>, double> best;
  for (const auto& e : ex.entries) {
    if (predicted_goal && e.predicted_goal != *predicted_goal) continue;
    auto key = std::pair{e.predicted_goal, e.counterfactual_goal};
    auto it = best.find(key);
    if (it == best.end() || e.woe > it->second) best[key] = e.woe;
  }
  if (best.empty()) throw Error(ErrorCode::kEmptyExplanan, "no entries for the requested goal");
  double overall = -std::numeric_limits<double>::infinity();
  for (const auto& [key, w] : best) overall = std::max(overall, w);
  for (const auto& e : ex.entries) {
    if (predicted_goal && e.predicted_goal != *predicted_goal) continue;
    const double pair_best = best.at({e.predicted_goal, e.counterfactual_goal});
    if (detail::near(e.woe, pair_best, tie_tolerance)) answer.pair_maxima.push_back(e);
    if (detail::near(e.woe, overall, tie_tolerance)) answer.markers.push_back(e);
  }
  return answer;
}

struct CounterfactualMarkers {
  std::size_t goal = 0;
  /// Minimum-WoE entries against this goal over all predicted goals.
  std::vector<ExplananEntry> entries;
};

inline std::vector<CounterfactualMarkers> select_cf_om(
    const CompleteExplanan& ex, std::optional<std::size_t> counterfactual_goal = std::nullopt,
    double tie_tolerance = kDefaultTieTolerance) {
  detail::require_entries(ex);
  std::vector<CounterfactualMarkers> out;
  for (std::size_t gc : ex.counterfactual) {
    if (counterfactual_goal && gc != *counterfactual_goal) continue;
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& e : ex.entries) {
      if (e.counterfactual_goal == gc) lowest = std::min(lowest, e.woe);
    }
    if (std::isinf(lowest)) continue;
    CounterfactualMarkers m{gc, {}};
    for (const auto& e : ex.entries) {
      if (e.counterfactual_goal == gc && detail::near(e.woe, lowest, tie_tolerance)) {
        m.entries.push_back(e);
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

struct CounterfactualAction {
  enum class Status { kAction, kAlreadyReached, kUnsolvable };

  std::size_t goal = 0;
  /// Observation index of the counterfactual marker it replaces.
  std::size_t observation = 0;
  Status status = Status::kUnsolvable;
  std::optional<ActionId> action;
  Plan plan;
};

struct ExplainOptions {
  PlannerOptions planner;
  double tie_tolerance = kDefaultTieTolerance;
  /// When set, time spent in counterfactual planning is added here.
  std::chrono::nanoseconds* counterfactual_planning_time = nullptr;
};

/// First step of the lexicographically-first optimal plan from the state
/// preceding the marker's observation to g'. The step may well lie on a plan
/// toward a predicted goal.
inline CounterfactualAction counterfactual_action(const GrProblem& problem,
                                                  const ExplananEntry& marker,
                                                  std::size_t g_prime,
                                                  const ExplainOptions& options = {}) {
  if (marker.observation == 0 || marker.observation > problem.observation_count()) {
    throw Error(ErrorCode::kValidationError,
                "marker observation " + std::to_string(marker.observation) + " out of range");
  }
  if (g_prime >= problem.goal_count()) {
    throw Error(ErrorCode::kValidationError, "unknown goal index " + std::to_string(g_prime));
  }
  const State& before = problem.state_after(marker.observation - 1);
  PlanningTask task{*problem.domain, before, problem.goals[g_prime]};
  const auto started = std::chrono::steady_clock::now();
  PlanResult result = optimal_plan(task, ZeroHeuristic{}, options.planner);
  if (options.counterfactual_planning_time) {
    *options.counterfactual_planning_time += std::chrono::steady_clock::now() - started;
  }

  CounterfactualAction out;
  out.goal = g_prime;
  out.observation = marker.observation;
  if (!result.solved()) return out;
  out.plan = result.plan;
  out.action = first_action(result);
  out.status = out.action ? CounterfactualAction::Status::kAction
                          : CounterfactualAction::Status::kAlreadyReached;
  return out;
}

struct WhyNotAnswer {
  std::vector<CounterfactualMarkers> markers;
  /// One per marker entry, in marker order.
  std::vector<CounterfactualAction> counterfactual_actions;
  /// Requested counterfactual goals with no entries at all.
  std::vector<std::size_t> unexplained_goals;
  std::string rendered;

  /// Counterfactual action for g' at its earliest marker.
  std::optional<ActionId> action_for(std::size_t g_prime) const {
    for (const auto& a : counterfactual_actions) {
      if (a.goal == g_prime) return a.action;
    }
    return std::nullopt;
  }
};

// --- rendering --------------------------------------------------------------

enum class PhraseForm {
  kPerfect,         // "has moved up from cell 26 to cell 17"
  kPast,            // "moved right from cell 23 to cell 24"
  kCounterfactual,  // "moved up from cell 23 to 14"
};

inline std::string action_phrase(const GrProblem& problem, ActionId a, PhraseForm form) {
  const CellMove* m = problem.move(a);
  if (!m) return "performed " + problem.domain->action(a).name;
  std::string out = form == PhraseForm::kPerfect ? "has moved " : "moved ";
  out += std::string(to_string(m->direction)) + " from cell " + std::to_string(m->from) + " to ";
  if (form != PhraseForm::kCounterfactual) out += "cell ";
  out += std::to_string(m->to);
  if (!m->pushed_boxes.empty()) {
    out += ", pushing ";
    for (std::size_t i = 0; i < m->pushed_boxes.size(); ++i) {
      if (i > 0) out += " and ";
      out += "box" + std::to_string(m->pushed_boxes[i]);
    }
  }
  return out;
}

namespace detail {

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::vector<std::size_t> distinct_observations(const std::vector<ExplananEntry>& entries) {
  std::set<std::size_t> seen;
  for (const auto& e : entries) seen.insert(e.observation);
  return {seen.begin(), seen.end()};
}

}  // namespace detail

inline std::string render(const WhyAnswer& answer, const GrProblem& problem) {
  std::vector<std::string> phrases;
  for (std::size_t i : detail::distinct_observations(answer.markers)) {
    phrases.push_back(
        action_phrase(problem, problem.observations.at(i - 1).action, PhraseForm::kPerfect));
  }
  return "Because the agent " + detail::join(phrases, " and ") + ".";
}

inline std::string render(const WhyNotAnswer& answer, const GrProblem& problem) {
  std::vector<std::string> sentences;
  for (const auto& m : answer.markers) {
    const std::string& label = problem.label(m.goal);
    std::vector<std::string> observed;
    for (std::size_t i : detail::distinct_observations(m.entries)) {
      observed.push_back(
          action_phrase(problem, problem.observations.at(i - 1).action, PhraseForm::kPast));
    }
    std::string text = "Because the agent " + detail::join(observed, " and ") + ".";

    std::vector<std::string> alternatives;
    bool reached = false;
    bool unreachable = false;
    for (const auto& a : answer.counterfactual_actions) {
      if (a.goal != m.goal) continue;
      switch (a.status) {
        case CounterfactualAction::Status::kAction: {
          auto phrase = action_phrase(problem, *a.action, PhraseForm::kCounterfactual);
          if (std::find(alternatives.begin(), alternatives.end(), phrase) == alternatives.end()) {
            alternatives.push_back(std::move(phrase));
          }
          break;
        }
        case CounterfactualAction::Status::kAlreadyReached: reached = true; break;
        case CounterfactualAction::Status::kUnsolvable: unreachable = true; break;
      }
    }
    if (!alternatives.empty()) {
      text += " It would have " + detail::join(alternatives, " or ") + " if the goal was " +
              label + ".";
    } else if (reached) {
      text += " Goal " + label + " was already reached at that point.";
    } else if (unreachable) {
      text += " Goal " + label + " is ruled out by infeasibility from that point.";
    }
    sentences.push_back(std::move(text));
  }
  for (std::size_t g : answer.unexplained_goals) {
    sentences.push_back("Goal " + problem.label(g) + " is ruled out by infeasibility.");
  }
  return detail::join(sentences, " ");
}

inline std::string format_woe(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", w);
  return buf;
}

// --- end-to-end answers -----------------------------------------------------

inline WhyAnswer explain_why(const GrProblem& problem, const CompleteExplanan& ex,
                             std::optional<std::size_t> predicted_goal = std::nullopt,
                             double tie_tolerance = kDefaultTieTolerance) {
  WhyAnswer answer = select_om(ex, predicted_goal, tie_tolerance);
  answer.rendered = render(answer, problem);
  return answer;
}

inline WhyNotAnswer explain_why_not(const GrProblem& problem, const CompleteExplanan& ex,
                                    std::optional<std::size_t> counterfactual_goal = std::nullopt,
                                    const ExplainOptions& options = {}) {
  if (ex.empty_counterfactual_set) {
    throw Error(ErrorCode::kEmptyCounterfactualSet, "no counterfactual goal to contrast against");
  }
  if (counterfactual_goal &&
      std::find(ex.counterfactual.begin(), ex.counterfactual.end(), *counterfactual_goal) ==
          ex.counterfactual.end()) {
    throw Error(ErrorCode::kValidationError,
                "goal " + problem.label(*counterfactual_goal) + " is not a counterfactual goal");
  }
  WhyNotAnswer answer;
  if (!ex.entries.empty()) {
    answer.markers = select_cf_om(ex, counterfactual_goal, options.tie_tolerance);
  }
  for (std::size_t gc : ex.counterfactual) {
    if (counterfactual_goal && gc != *counterfactual_goal) continue;
    const bool has = std::any_of(answer.markers.begin(), answer.markers.end(),
                                 [&](const auto& m) { return m.goal == gc; });
    if (!has) answer.unexplained_goals.push_back(gc);
  }
  for (const auto& m : answer.markers) {
    std::set<std::size_t> planned;
    for (const auto& e : m.entries) {
      if (!planned.insert(e.observation).second) continue;
      answer.counterfactual_actions.push_back(counterfactual_action(problem, e, m.goal, options));
    }
  }
  answer.rendered = render(answer, problem);
  return answer;
}

// --- ranking ----------------------------------------------------------------

struct RankTable {
  /// Indexed by observation - 1. Rank 0 marks observations without entries.
  std::vector<int> why;
  std::vector<int> whynot;
  /// Aggregated WoE per observation: max over pairs (why), min (why not).
  std::vector<std::optional<double>> why_woe;
  std::vector<std::optional<double>> whynot_woe;
};

namespace detail {

/// Dense ranking: equal values (within tol) share a rank.
inline std::vector<int> dense_rank(const std::vector<std::optional<double>>& values, bool descending,
                                   double tol) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? *values[a] > *values[b] : *values[a] < *values[b];
  });
  std::vector<int> ranks(values.size(), 0);
  int rank = 0;
  std::optional<double> previous;
  for (std::size_t idx : order) {
    if (!previous || !near(*values[idx], *previous, tol)) {
      ++rank;
      previous = values[idx];
    }
    ranks[idx] = rank;
  }
  return ranks;
}

}  // namespace detail

inline RankTable rank_observations(const CompleteExplanan& ex,
                                   double tie_tolerance = kDefaultTieTolerance) {
  RankTable t;
  t.why_woe.assign(ex.observation_count, std::nullopt);
  t.whynot_woe.assign(ex.observation_count, std::nullopt);
  for (const auto& e : ex.entries) {
    auto& hi = t.why_woe.at(e.observation - 1);
    auto& lo = t.whynot_woe.at(e.observation - 1);
    hi = hi ? std::max(*hi, e.woe) : e.woe;
    lo = lo ? std::min(*lo, e.woe) : e.woe;
  }
  t.why = detail::dense_rank(t.why_woe, true, tie_tolerance);
  t.whynot = detail::dense_rank(t.whynot_woe, false, tie_tolerance);
  return t;
}

}  // namespace xgr

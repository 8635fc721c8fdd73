#pragma once

// Mirroring goal recognition over fully observed action sequences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xgr/domains.hpp"
#include "xgr/error.hpp"
#include "xgr/planner.hpp"
#include "xgr/strips.hpp"

namespace xgr {

inline constexpr double kDefaultTieTolerance = 1e-9;

struct Observation {
  ActionId action;
  State resulting_state;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct GrProblem {
  std::shared_ptr<const DomainDefinition> domain;
  State initial;
  std::vector<Goal> goals;
  std::vector<std::string> goal_labels;
  std::vector<Observation> observations;
  /// Optional rendering metadata indexed by ActionId (grid and Sokoban only).
  std::vector<std::optional<CellMove>> moves;
  DomainKind kind = DomainKind::kStrips;

  std::size_t goal_count() const { return goals.size(); }
  std::size_t observation_count() const { return observations.size(); }

  const std::string& label(std::size_t goal) const { return goal_labels.at(goal); }

  /// State after the first i observations (i = 0 is the initial state).
  const State& state_after(std::size_t i) const {
    return i == 0 ? initial : observations.at(i - 1).resulting_state;
  }

  const CellMove* move(ActionId a) const {
    if (a.value >= moves.size() || !moves[a.value]) return nullptr;
    return &*moves[a.value];
  }
};

/// Applies each action in turn; throws kInvalidObservationChain with the
/// 1-based index of the first observation that cannot be applied.
inline std::vector<Observation> make_observations(const DomainDefinition& domain,
                                                  const State& initial,
                                                  const std::vector<ActionId>& actions) {
  std::vector<Observation> out;
  State s = initial;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = domain.action(actions[i]);
    if (!applicable(s, a)) {
      throw Error(ErrorCode::kInvalidObservationChain,
                  "observation " + std::to_string(i + 1) + " ('" + a.name +
                      "') is not applicable in " + describe_state(domain, s));
    }
    s = apply(s, a);
    out.push_back({actions[i], s});
  }
  return out;
}

inline GrProblem make_problem(const CompiledDomain& compiled, const std::vector<ActionId>& actions) {
  GrProblem p;
  p.domain = compiled.domain;
  p.initial = compiled.initial;
  p.goals = compiled.goals;
  p.goal_labels = compiled.goal_labels;
  p.moves = compiled.moves;
  p.kind = compiled.kind;
  p.observations = make_observations(*compiled.domain, compiled.initial, actions);
  return p;
}

inline void validate_problem(const GrProblem& p) {
  if (!p.domain) throw Error(ErrorCode::kValidationError, "problem has no domain");
  if (p.goals.empty()) throw Error(ErrorCode::kValidationError, "problem has no goals");
  if (p.goal_labels.size() != p.goals.size()) {
    throw Error(ErrorCode::kValidationError, "goal label count does not match goal count");
  }
  State s = p.initial;
  for (std::size_t i = 0; i < p.observations.size(); ++i) {
    const auto& o = p.observations[i];
    const auto& a = p.domain->action(o.action);
    if (!applicable(s, a) || apply(s, a) != o.resulting_state) {
      throw Error(ErrorCode::kInvalidObservationChain,
                  "observation chain breaks at observation " + std::to_string(i + 1));
    }
    s = o.resulting_state;
  }
}

struct PosteriorTrace {
  /// per_prefix[i] is P(. | O_i) for i = 0..n; entry 0 conditions on no
  /// observations.
  std::vector<std::vector<double>> per_prefix;
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> counterfactual;
  /// Optimal cost from the initial state per goal (nullopt: unsolvable).
  std::vector<std::optional<int>> optimal_costs;
  /// suffix_costs[i][g]: optimal cost from the state after o_i to goal g.
  std::vector<std::vector<std::optional<int>>> suffix_costs;
  /// Optional non-uniform goal priors the posteriors were weighted by.
  std::vector<double> priors;

  std::size_t observation_count() const {
    return per_prefix.empty() ? 0 : per_prefix.size() - 1;
  }
  std::size_t goal_count() const { return per_prefix.empty() ? 0 : per_prefix.front().size(); }
  const std::vector<double>& final_distribution() const { return per_prefix.back(); }
};

struct GoalSplit {
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> counterfactual;
};

/// Co-maximal goals (within tie_tolerance of the final maximum) are predicted;
/// the rest are counterfactual.
inline GoalSplit split_goal_sets(const PosteriorTrace& trace,
                                 double tie_tolerance = kDefaultTieTolerance) {
  if (trace.per_prefix.empty()) throw Error(ErrorCode::kValidationError, "empty posterior trace");
  const auto& last = trace.final_distribution();
  const double best = *std::max_element(last.begin(), last.end());
  GoalSplit split;
  for (std::size_t g = 0; g < last.size(); ++g) {
    (best - last[g] <= tie_tolerance ? split.predicted : split.counterfactual).push_back(g);
  }
  return split;
}

struct MirrorOptions {
  PlannerOptions planner;
  double tie_tolerance = kDefaultTieTolerance;
  /// Empty for uniform priors; otherwise one positive weight per goal.
  std::vector<double> priors;
};

/// Mirroring score optCost(I->g) / (i + optCost(s_i->g)), 0 when either plan
/// does not exist. A goal already satisfied with no observations scores 1.
inline double mirror_score(std::optional<int> optimal, std::size_t prefix_cost,
                           std::optional<int> suffix) {
  if (!optimal || !suffix) return 0.0;
  const double denom = static_cast<double>(prefix_cost) + *suffix;
  if (denom == 0.0) return 1.0;
  return *optimal / denom;
}

/// `heuristic_for(goal_index)` must return a Heuristic for that goal.
template <class HeuristicFactory>
PosteriorTrace mirror_posteriors(const GrProblem& problem, const MirrorOptions& options,
                                 HeuristicFactory&& heuristic_for) {
  validate_problem(problem);
  const std::size_t m = problem.goal_count();
  const std::size_t n = problem.observation_count();
  if (!options.priors.empty()) {
    if (options.priors.size() != m) {
      throw Error(ErrorCode::kValidationError, "prior count does not match goal count");
    }
    for (double p : options.priors) {
      if (!(p > 0.0)) throw Error(ErrorCode::kZeroPrior, "goal priors must be positive");
    }
  }

  auto cost_from = [&](const State& s, std::size_t g) {
    PlanningTask task{*problem.domain, s, problem.goals[g]};
    return optimal_cost(task, heuristic_for(g), options.planner);
  };

  PosteriorTrace trace;
  trace.priors = options.priors;
  for (std::size_t g = 0; g < m; ++g) trace.optimal_costs.push_back(cost_from(problem.initial, g));

  for (std::size_t i = 0; i <= n; ++i) {
    const State& s = problem.state_after(i);
    std::vector<std::optional<int>> suffix(m);
    std::vector<double> scores(m);
    double total = 0.0;
    for (std::size_t g = 0; g < m; ++g) {
      suffix[g] = i == 0 ? trace.optimal_costs[g] : cost_from(s, g);
      scores[g] = mirror_score(trace.optimal_costs[g], i, suffix[g]);
      if (!options.priors.empty()) scores[g] *= options.priors[g];
      total += scores[g];
    }
    if (total <= 0.0) {
      throw Error(ErrorCode::kAllGoalsUnsolvable,
                  "every goal is unreachable after " + std::to_string(i) + " observation(s)");
    }
    for (double& v : scores) v /= total;
    trace.per_prefix.push_back(std::move(scores));
    trace.suffix_costs.push_back(std::move(suffix));
  }

  auto split = split_goal_sets(trace, options.tie_tolerance);
  trace.predicted = std::move(split.predicted);
  trace.counterfactual = std::move(split.counterfactual);
  return trace;
}

inline PosteriorTrace mirror_posteriors(const GrProblem& problem, const MirrorOptions& options = {}) {
  return mirror_posteriors(problem, options, [](std::size_t) { return ZeroHeuristic{}; });
}

}  // namespace xgr

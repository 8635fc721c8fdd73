#pragma once

// Cost-optimal forward search over ground STRIPS states.
//
// Plans are found by breadth-first uniform-cost search that expands successors
// in action-name order and records a parent on first discovery. With unit
// costs this returns, among all optimal plans, the one whose action-name
// sequence is lexicographically smallest. An admissible heuristic first bounds
// the optimal cost with A*, then prunes the tie-breaking pass to f <= C*.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "xgr/error.hpp"
#include "xgr/strips.hpp"

namespace xgr {

enum class HeuristicKind { kZero, kManhattan };

inline constexpr std::size_t kDefaultExpansionBudget = 10'000'000;

struct PlannerOptions {
  std::size_t expansion_budget = kDefaultExpansionBudget;
};

struct PlanningTask {
  const DomainDefinition& domain;
  State initial;
  Goal goal;
};

struct PlanResult {
  enum class Status { kSolved, kUnsolvable };

  Status status = Status::kUnsolvable;
  Plan plan;
  int cost = 0;
  std::size_t expansions = 0;

  bool solved() const { return status == Status::kSolved; }
};

template <class H>
concept Heuristic = requires(const H& h, const State& s) {
  { h(s) } -> std::convertible_to<int>;
};

struct ZeroHeuristic {
  int operator()(const State&) const { return 0; }
};

namespace detail {

class ExpansionCounter {
 public:
  explicit ExpansionCounter(std::size_t budget) : budget_(budget) {}

  void tick() {
    if (++count_ > budget_) {
      throw Error(ErrorCode::kBudgetExceeded,
                  "node expansion budget of " + std::to_string(budget_) + " exceeded");
    }
  }

  std::size_t count() const { return count_; }

 private:
  std::size_t budget_;
  std::size_t count_ = 0;
};

/// A* returning only the optimal cost. Requires a consistent heuristic.
template <Heuristic H>
std::optional<int> astar_cost(const PlanningTask& task, const H& h, ExpansionCounter& counter) {
  if (task.initial.contains_all(task.goal)) return 0;
  struct Entry {
    int f;
    int g;
    std::uint64_t seq;
    std::uint32_t node;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.seq > b.seq;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::vector<State> states;
  std::vector<int> best_g;
  std::unordered_map<State, std::uint32_t, StateHash> index;
  std::uint64_t seq = 0;

  states.push_back(task.initial);
  best_g.push_back(0);
  index.emplace(task.initial, 0);
  open.push({h(task.initial), 0, seq++, 0});

  const auto order = task.domain.actions_by_name();
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (top.g > best_g[top.node]) continue;
    const State current = states[top.node];
    if (current.contains_all(task.goal)) return top.g;
    counter.tick();
    for (ActionId id : order) {
      const auto& a = task.domain.action(id);
      if (!applicable(current, a)) continue;
      State next = apply(current, a);
      const int g = top.g + a.cost;
      auto [it, inserted] = index.try_emplace(next, static_cast<std::uint32_t>(states.size()));
      if (inserted) {
        states.push_back(next);
        best_g.push_back(g);
      } else if (g < best_g[it->second]) {
        best_g[it->second] = g;
      } else {
        continue;
      }
      open.push({g + h(next), g, seq++, it->second});
    }
  }
  return std::nullopt;
}

/// Breadth-first search with name-ordered expansion. Nodes whose g + h exceeds
/// `bound` are never generated.
template <Heuristic H>
PlanResult lexicographic_bfs(const PlanningTask& task, const H& h, std::optional<int> bound,
                             ExpansionCounter& counter) {
  struct Node {
    State state;
    std::int64_t parent;
    ActionId via;
    int g;
  };
  std::vector<Node> nodes;
  std::unordered_map<State, std::uint32_t, StateHash> seen;
  std::deque<std::uint32_t> frontier;

  nodes.push_back({task.initial, -1, ActionId{}, 0});
  seen.emplace(task.initial, 0);
  frontier.push_back(0);

  const auto order = task.domain.actions_by_name();
  while (!frontier.empty()) {
    const std::uint32_t idx = frontier.front();
    frontier.pop_front();
    if (nodes[idx].state.contains_all(task.goal)) {
      PlanResult result;
      result.status = PlanResult::Status::kSolved;
      result.cost = nodes[idx].g;
      for (std::int64_t n = idx; nodes[static_cast<std::size_t>(n)].parent >= 0;
           n = nodes[static_cast<std::size_t>(n)].parent) {
        result.plan.actions.push_back(nodes[static_cast<std::size_t>(n)].via);
      }
      std::reverse(result.plan.actions.begin(), result.plan.actions.end());
      return result;
    }
    counter.tick();
    const State current = nodes[idx].state;
    const int g = nodes[idx].g;
    for (ActionId id : order) {
      const auto& a = task.domain.action(id);
      if (!applicable(current, a)) continue;
      State next = apply(current, a);
      if (seen.contains(next)) continue;
      if (bound && g + a.cost + h(next) > *bound) continue;
      const auto child = static_cast<std::uint32_t>(nodes.size());
      seen.emplace(next, child);
      nodes.push_back({std::move(next), idx, id, g + a.cost});
      frontier.push_back(child);
    }
  }
  return {};
}

}  // namespace detail

/// Minimum-cost plan, lexicographically first by action name among ties.
/// Throws Error(kBudgetExceeded) when the expansion budget runs out.
template <Heuristic H = ZeroHeuristic>
PlanResult optimal_plan(const PlanningTask& task, const H& heuristic = {},
                        const PlannerOptions& options = {}) {
  detail::ExpansionCounter counter(options.expansion_budget);
  std::optional<int> bound;
  if constexpr (!std::same_as<H, ZeroHeuristic>) {
    bound = detail::astar_cost(task, heuristic, counter);
    if (!bound) {
      PlanResult unsolvable;
      unsolvable.expansions = counter.count();
      return unsolvable;
    }
  }
  PlanResult result = detail::lexicographic_bfs(task, heuristic, bound, counter);
  result.expansions = counter.count();
  return result;
}

/// Cost-only fast path; std::nullopt means unsolvable.
template <Heuristic H = ZeroHeuristic>
std::optional<int> optimal_cost(const PlanningTask& task, const H& heuristic = {},
                                 const PlannerOptions& options = {}) {
  detail::ExpansionCounter counter(options.expansion_budget);
  return detail::astar_cost(task, heuristic, counter);
}

inline std::optional<ActionId> first_action(const PlanResult& result) {
  if (!result.solved() || result.plan.empty()) return std::nullopt;
  return result.plan.actions.front();
}

}  // namespace xgr

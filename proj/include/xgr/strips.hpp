#pragma once

// Ground STRIPS world model: interned facts, closed-world states, unit-cost
// actions with add/delete effects, and plan validation.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xgr/error.hpp"

namespace xgr {

/// Interned fact symbol. Ids are dense and ordered by interning order, which
/// gives every fact set a deterministic iteration and comparison order.
struct FactId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(FactId, FactId) = default;
};

struct ActionId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(ActionId, ActionId) = default;
};

/// Conjunctive goal: sorted, duplicate-free fact list.
using Goal = std::vector<FactId>;

inline Goal make_goal(std::vector<FactId> facts) {
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
  return facts;
}

/// Closed-world fact set over a fixed universe, stored as a bitset.
class State {
 public:
  State() = default;
  explicit State(std::size_t universe_size)
      : universe_(universe_size), words_((universe_size + 63) / 64, 0) {}

  std::size_t universe_size() const { return universe_; }

  bool contains(FactId f) const {
    return f.value < universe_ && ((words_[f.value / 64] >> (f.value % 64)) & 1U) != 0;
  }

  bool contains_all(std::span<const FactId> facts) const {
    return std::all_of(facts.begin(), facts.end(), [&](FactId f) { return contains(f); });
  }

  void insert(FactId f) {
    check(f);
    words_[f.value / 64] |= std::uint64_t{1} << (f.value % 64);
  }

  void erase(FactId f) {
    check(f);
    words_[f.value / 64] &= ~(std::uint64_t{1} << (f.value % 64));
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  std::vector<FactId> facts() const {
    std::vector<FactId> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        out.push_back(FactId{static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(b))});
        bits &= bits - 1;
      }
    }
    return out;
  }

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ULL;
    for (auto w : words_) {
      h ^= static_cast<std::size_t>(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  friend bool operator==(const State&, const State&) = default;

 private:
  void check(FactId f) const {
    if (f.value >= universe_) {
      throw Error(ErrorCode::kMalformedDomain,
                  "fact id " + std::to_string(f.value) + " outside universe of size " +
                      std::to_string(universe_));
    }
  }

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GroundAction {
  std::string name;
  std::vector<FactId> preconditions;
  std::vector<FactId> add_effects;
  std::vector<FactId> delete_effects;
  int cost = 1;
};

/// Immutable ground domain Ξ = ⟨F, A⟩. Built through DomainBuilder, which
/// enforces unique names, disjoint add/delete sets, and unit costs.
class DomainDefinition {
 public:
  std::size_t fact_count() const { return fact_names_.size(); }
  std::size_t action_count() const { return actions_.size(); }

  const std::string& fact_name(FactId f) const { return fact_names_.at(f.value); }
  const std::vector<std::string>& fact_names() const { return fact_names_; }

  std::optional<FactId> find_fact(std::string_view name) const {
    auto it = fact_index_.find(std::string(name));
    if (it == fact_index_.end()) return std::nullopt;
    return it->second;
  }

  FactId fact(std::string_view name) const {
    if (auto f = find_fact(name)) return *f;
    throw Error(ErrorCode::kValidationError, "unknown fact '" + std::string(name) + "'");
  }

  const GroundAction& action(ActionId a) const { return actions_.at(a.value); }
  const std::vector<GroundAction>& actions() const { return actions_; }

  std::optional<ActionId> find_action(std::string_view name) const {
    auto it = action_index_.find(std::string(name));
    if (it == action_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Action ids sorted by action name; the planner expands in this order.
  std::span<const ActionId> actions_by_name() const { return by_name_; }

  State empty_state() const { return State(fact_count()); }

  State make_state(std::span<const FactId> facts) const {
    State s = empty_state();
    for (FactId f : facts) s.insert(f);
    return s;
  }

  State make_state(std::initializer_list<std::string_view> names) const {
    State s = empty_state();
    for (auto n : names) s.insert(fact(n));
    return s;
  }

  friend bool operator==(const DomainDefinition& a, const DomainDefinition& b) {
    if (a.fact_names_ != b.fact_names_ || a.actions_.size() != b.actions_.size()) return false;
    for (std::size_t i = 0; i < a.actions_.size(); ++i) {
      const auto& x = a.actions_[i];
      const auto& y = b.actions_[i];
      if (x.name != y.name || x.preconditions != y.preconditions ||
          x.add_effects != y.add_effects || x.delete_effects != y.delete_effects ||
          x.cost != y.cost) {
        return false;
      }
    }
    return true;
  }

 private:
  friend class DomainBuilder;

  std::vector<std::string> fact_names_;
  std::unordered_map<std::string, FactId> fact_index_;
  std::vector<GroundAction> actions_;
  std::unordered_map<std::string, ActionId> action_index_;
  std::vector<ActionId> by_name_;
};

class DomainBuilder {
 public:
  /// Interns a fact; returns the existing id when the name is already known.
  FactId fact(std::string_view name) {
    auto key = std::string(name);
    if (auto it = domain_.fact_index_.find(key); it != domain_.fact_index_.end()) {
      return it->second;
    }
    FactId id{static_cast<std::uint32_t>(domain_.fact_names_.size())};
    domain_.fact_names_.push_back(key);
    domain_.fact_index_.emplace(std::move(key), id);
    return id;
  }

  ActionId action(GroundAction a) {
    if (a.cost != 1) {
      throw Error(ErrorCode::kMalformedDomain, "action '" + a.name + "' must have unit cost");
    }
    if (domain_.action_index_.contains(a.name)) {
      throw Error(ErrorCode::kMalformedDomain, "duplicate action name '" + a.name + "'");
    }
    a.preconditions = make_goal(std::move(a.preconditions));
    a.add_effects = make_goal(std::move(a.add_effects));
    a.delete_effects = make_goal(std::move(a.delete_effects));
    for (auto* set : {&a.preconditions, &a.add_effects, &a.delete_effects}) {
      for (FactId f : *set) {
        if (f.value >= domain_.fact_names_.size()) {
          throw Error(ErrorCode::kMalformedDomain,
                      "action '" + a.name + "' references a fact outside the universe");
        }
      }
    }
    std::vector<FactId> overlap;
    std::set_intersection(a.add_effects.begin(), a.add_effects.end(), a.delete_effects.begin(),
                          a.delete_effects.end(), std::back_inserter(overlap));
    if (!overlap.empty()) {
      throw Error(ErrorCode::kMalformedDomain,
                  "action '" + a.name + "' adds and deletes '" +
                      domain_.fact_names_[overlap.front().value] + "'");
    }
    ActionId id{static_cast<std::uint32_t>(domain_.actions_.size())};
    domain_.action_index_.emplace(a.name, id);
    domain_.actions_.push_back(std::move(a));
    return id;
  }

  /// Convenience overload taking fact names; unknown names are interned.
  ActionId action(std::string name, std::initializer_list<std::string_view> pre,
                  std::initializer_list<std::string_view> add,
                  std::initializer_list<std::string_view> del) {
    GroundAction a{std::move(name), {}, {}, {}, 1};
    for (auto n : pre) a.preconditions.push_back(fact(n));
    for (auto n : add) a.add_effects.push_back(fact(n));
    for (auto n : del) a.delete_effects.push_back(fact(n));
    return action(std::move(a));
  }

  std::shared_ptr<const DomainDefinition> build() && {
    auto& ids = domain_.by_name_;
    ids.clear();
    for (std::uint32_t i = 0; i < domain_.actions_.size(); ++i) ids.push_back(ActionId{i});
    std::sort(ids.begin(), ids.end(), [&](ActionId x, ActionId y) {
      return domain_.actions_[x.value].name < domain_.actions_[y.value].name;
    });
    return std::make_shared<const DomainDefinition>(std::move(domain_));
  }

 private:
  DomainDefinition domain_;
};

inline bool applicable(const State& state, const GroundAction& action) {
  return state.contains_all(action.preconditions);
}

/// Progression: (state \ del) ∪ add.
inline State apply(const State& state, const GroundAction& action) {
  if (!applicable(state, action)) {
    throw Error(ErrorCode::kNotApplicable, "action '" + action.name + "' is not applicable");
  }
  State next = state;
  for (FactId f : action.delete_effects) next.erase(f);
  for (FactId f : action.add_effects) next.insert(f);
  return next;
}

struct Plan {
  std::vector<ActionId> actions;

  bool empty() const { return actions.empty(); }
  std::size_t size() const { return actions.size(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct PlanValidation {
  enum class Reason { kOk, kNotApplicable, kGoalNotReached };

  Reason reason = Reason::kOk;
  /// Index of the first failing step (kNotApplicable) or plan length.
  std::size_t step = 0;

  explicit operator bool() const { return reason == Reason::kOk; }
};

inline PlanValidation validate_plan(const DomainDefinition& domain, const State& initial,
                                    std::span<const FactId> goal, const Plan& plan) {
  State s = initial;
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const auto& a = domain.action(plan.actions[i]);
    if (!applicable(s, a)) return {PlanValidation::Reason::kNotApplicable, i};
    s = apply(s, a);
  }
  if (!s.contains_all(goal)) return {PlanValidation::Reason::kGoalNotReached, plan.size()};
  return {PlanValidation::Reason::kOk, plan.size()};
}

inline std::string describe_state(const DomainDefinition& domain, const State& s) {
  std::string out = "{";
  bool first = true;
  for (FactId f : s.facts()) {
    if (!first) out += ", ";
    out += domain.fact_name(f);
    first = false;
  }
  return out + "}";
}

}  // namespace xgr

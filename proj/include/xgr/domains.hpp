#pragma once

// Compilation of grid-navigation and Sokoban scenarios into ground STRIPS.
//
// Cells are numbered 1..width*height, row-major from the top-left corner, so
// "up" from cell c is c - width and "right" is c + 1.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xgr/error.hpp"
#include "xgr/planner.hpp"
#include "xgr/strips.hpp"

namespace xgr {

enum class Direction { kUp, kDown, kLeft, kRight };

constexpr std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kUp: return "up";
    case Direction::kDown: return "down";
    case Direction::kLeft: return "left";
    case Direction::kRight: return "right";
  }
  return "?";
}

inline std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "up") return Direction::kUp;
  if (s == "down") return Direction::kDown;
  if (s == "left") return Direction::kLeft;
  if (s == "right") return Direction::kRight;
  return std::nullopt;
}

inline constexpr Direction kAllDirections[] = {Direction::kUp, Direction::kDown, Direction::kLeft,
                                               Direction::kRight};

/// Label of the move between two row-major adjacent cells.
inline Direction cell_move_name(int from, int to, int width) {
  if (width <= 0) throw Error(ErrorCode::kNotAdjacent, "width must be positive");
  const int fr = (from - 1) / width, fc = (from - 1) % width;
  const int tr = (to - 1) / width, tc = (to - 1) % width;
  if (from >= 1 && to >= 1) {
    if (fc == tc && tr == fr - 1) return Direction::kUp;
    if (fc == tc && tr == fr + 1) return Direction::kDown;
    if (fr == tr && tc == fc - 1) return Direction::kLeft;
    if (fr == tr && tc == fc + 1) return Direction::kRight;
  }
  throw Error(ErrorCode::kNotAdjacent,
              "cells " + std::to_string(from) + " and " + std::to_string(to) + " are not adjacent");
}

/// Geometry helper shared by both compilers.
struct GridGeometry {
  int width = 0;
  int height = 0;

  int cell_count() const { return width * height; }
  bool in_range(int cell) const { return cell >= 1 && cell <= cell_count(); }
  int row(int cell) const { return (cell - 1) / width; }
  int col(int cell) const { return (cell - 1) % width; }

  std::optional<int> neighbor(int cell, Direction d) const {
    const int r = row(cell), c = col(cell);
    switch (d) {
      case Direction::kUp: return r > 0 ? std::optional<int>(cell - width) : std::nullopt;
      case Direction::kDown:
        return r + 1 < height ? std::optional<int>(cell + width) : std::nullopt;
      case Direction::kLeft: return c > 0 ? std::optional<int>(cell - 1) : std::nullopt;
      case Direction::kRight: return c + 1 < width ? std::optional<int>(cell + 1) : std::nullopt;
    }
    return std::nullopt;
  }

  int manhattan(int a, int b) const {
    return std::abs(row(a) - row(b)) + std::abs(col(a) - col(b));
  }
};

/// Rendering metadata for a compiled movement action.
struct CellMove {
  Direction direction = Direction::kUp;
  int from = 0;
  int to = 0;
  /// 1-based box numbers pushed by this move (Sokoban only), nearest first.
  std::vector<int> pushed_boxes;

  friend bool operator==(const CellMove&, const CellMove&) = default;
};

enum class DomainKind { kGrid, kSokoban, kStrips };

constexpr std::string_view to_string(DomainKind k) {
  switch (k) {
    case DomainKind::kGrid: return "grid";
    case DomainKind::kSokoban: return "sokoban";
    case DomainKind::kStrips: return "strips";
  }
  return "?";
}

struct CompiledDomain {
  DomainKind kind = DomainKind::kStrips;
  std::shared_ptr<const DomainDefinition> domain;
  State initial;
  std::vector<Goal> goals;
  std::vector<std::string> goal_labels;
  /// Indexed by ActionId; empty for generic STRIPS domains.
  std::vector<std::optional<CellMove>> moves;
  GridGeometry geometry;
  /// Goal hypotheses that have no plan from the initial state.
  std::vector<std::string> warnings;
};

struct GridSpec {
  int width = 0;
  int height = 0;
  std::set<int> blocked;
  int start = 0;
  std::vector<int> goal_cells;
};

struct SokobanSpec {
  int width = 0;
  int height = 0;
  std::set<int> walls;
  int player = 0;
  std::vector<int> boxes;
  std::vector<int> storage;
  /// One hypothesis per entry: storage index (0-based) for box k at position k.
  std::vector<std::vector<int>> goal_assignments;
  bool multi_push = false;
};

inline std::string grid_fact_name(int cell) { return "at-cell-" + std::to_string(cell); }

inline std::string grid_action_name(Direction d, int from, int to) {
  return "move-" + std::string(to_string(d)) + "-" + std::to_string(from) + "-" +
         std::to_string(to);
}

namespace detail {

inline std::vector<std::string> audit_goals(const CompiledDomain& c) {
  std::vector<std::string> warnings;
  for (std::size_t g = 0; g < c.goals.size(); ++g) {
    PlanningTask task{*c.domain, c.initial, c.goals[g]};
    if (!optimal_cost(task)) {
      warnings.push_back("goal " + c.goal_labels[g] + " is unsolvable from the initial state");
    }
  }
  return warnings;
}

inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("g" + std::to_string(i + 1));
  return labels;
}

}  // namespace detail

inline CompiledDomain compile_grid(const GridSpec& spec, bool audit = true) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw Error(ErrorCode::kMalformedSpec, "grid dimensions must be positive");
  }
  const GridGeometry geo{spec.width, spec.height};
  auto require_free = [&](int cell, const std::string& what) {
    if (!geo.in_range(cell)) {
      throw Error(ErrorCode::kMalformedSpec, what + " cell " + std::to_string(cell) + " out of range");
    }
    if (spec.blocked.contains(cell)) {
      throw Error(ErrorCode::kMalformedSpec, what + " cell " + std::to_string(cell) + " is blocked");
    }
  };
  for (int b : spec.blocked) {
    if (!geo.in_range(b)) {
      throw Error(ErrorCode::kMalformedSpec, "blocked cell " + std::to_string(b) + " out of range");
    }
  }
  require_free(spec.start, "start");
  if (spec.goal_cells.empty()) throw Error(ErrorCode::kMalformedSpec, "no goal cells");
  for (int g : spec.goal_cells) require_free(g, "goal");

  DomainBuilder b;
  for (int c = 1; c <= geo.cell_count(); ++c) b.fact(grid_fact_name(c));
  std::vector<std::optional<CellMove>> moves;
  for (int c = 1; c <= geo.cell_count(); ++c) {
    if (spec.blocked.contains(c)) continue;
    for (Direction d : kAllDirections) {
      auto n = geo.neighbor(c, d);
      if (!n || spec.blocked.contains(*n)) continue;
      const auto from = b.fact(grid_fact_name(c));
      const auto to = b.fact(grid_fact_name(*n));
      b.action(GroundAction{grid_action_name(d, c, *n), {from}, {to}, {from}, 1});
      moves.push_back(CellMove{d, c, *n, {}});
    }
  }

  CompiledDomain out;
  out.kind = DomainKind::kGrid;
  out.domain = std::move(b).build();
  out.geometry = geo;
  out.moves = std::move(moves);
  out.initial = out.domain->make_state({grid_fact_name(spec.start)});
  for (int g : spec.goal_cells) out.goals.push_back({out.domain->fact(grid_fact_name(g))});
  out.goal_labels = detail::default_labels(out.goals.size());
  if (audit) out.warnings = detail::audit_goals(out);
  return out;
}

inline std::string sokoban_player_fact(int cell) { return "player-at-" + std::to_string(cell); }
inline std::string sokoban_box_fact(int box, int cell) {
  return "box" + std::to_string(box) + "-at-" + std::to_string(cell);
}
inline std::string sokoban_clear_fact(int cell) { return "clear-" + std::to_string(cell); }

/// Ground Sokoban with distinguishable boxes. Facts: player-at-c, box<k>-at-c
/// and clear-c (no box, no player) for every non-wall cell. A push moves the
/// adjacent box one cell; with multi_push a line of two boxes moves together.
inline CompiledDomain compile_sokoban(const SokobanSpec& spec, bool audit = true) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw Error(ErrorCode::kMalformedSpec, "board dimensions must be positive");
  }
  const GridGeometry geo{spec.width, spec.height};
  auto free_cell = [&](int c) { return geo.in_range(c) && !spec.walls.contains(c); };

  std::set<int> occupied;
  auto claim = [&](int cell, const std::string& what) {
    if (!free_cell(cell)) {
      throw Error(ErrorCode::kMalformedSpec,
                  what + " cell " + std::to_string(cell) + " is a wall or out of range");
    }
    if (!occupied.insert(cell).second) {
      throw Error(ErrorCode::kMalformedSpec, what + " overlaps another entity at cell " +
                                                 std::to_string(cell));
    }
  };
  claim(spec.player, "player");
  for (int box : spec.boxes) claim(box, "box");
  std::set<int> storage_cells;
  for (int s : spec.storage) {
    if (!free_cell(s)) {
      throw Error(ErrorCode::kMalformedSpec, "storage cell " + std::to_string(s) + " is a wall");
    }
    if (!storage_cells.insert(s).second || occupied.contains(s)) {
      throw Error(ErrorCode::kMalformedSpec,
                  "storage cell " + std::to_string(s) + " overlaps another entity");
    }
  }
  if (spec.boxes.empty()) throw Error(ErrorCode::kMalformedSpec, "no boxes");
  if (spec.goal_assignments.empty()) throw Error(ErrorCode::kMalformedSpec, "no goals");
  for (const auto& assignment : spec.goal_assignments) {
    if (assignment.size() != spec.boxes.size()) {
      throw Error(ErrorCode::kMalformedSpec, "each goal must assign every box a storage cell");
    }
    for (int s : assignment) {
      if (s < 0 || static_cast<std::size_t>(s) >= spec.storage.size()) {
        throw Error(ErrorCode::kMalformedSpec, "goal references unknown storage index");
      }
    }
  }

  const int box_count = static_cast<int>(spec.boxes.size());
  std::vector<int> cells;
  for (int c = 1; c <= geo.cell_count(); ++c) {
    if (free_cell(c)) cells.push_back(c);
  }

  DomainBuilder b;
  for (int c : cells) b.fact(sokoban_player_fact(c));
  for (int k = 1; k <= box_count; ++k) {
    for (int c : cells) b.fact(sokoban_box_fact(k, c));
  }
  for (int c : cells) b.fact(sokoban_clear_fact(c));

  std::vector<std::optional<CellMove>> moves;
  auto add = [&](GroundAction a, CellMove m) {
    b.action(std::move(a));
    moves.push_back(std::move(m));
  };
  for (int c : cells) {
    for (Direction d : kAllDirections) {
      auto n1 = geo.neighbor(c, d);
      if (!n1 || !free_cell(*n1)) continue;
      const std::string dir(to_string(d));
      const auto p_from = b.fact(sokoban_player_fact(c));
      const auto p_to = b.fact(sokoban_player_fact(*n1));
      add(GroundAction{grid_action_name(d, c, *n1),
                       {p_from, b.fact(sokoban_clear_fact(*n1))},
                       {p_to, b.fact(sokoban_clear_fact(c))},
                       {p_from, b.fact(sokoban_clear_fact(*n1))},
                       1},
          CellMove{d, c, *n1, {}});

      auto n2 = geo.neighbor(*n1, d);
      if (!n2 || !free_cell(*n2)) continue;
      for (int k = 1; k <= box_count; ++k) {
        add(GroundAction{"push-" + dir + "-" + std::to_string(c) + "-" + std::to_string(*n1) +
                             "-box" + std::to_string(k),
                         {p_from, b.fact(sokoban_box_fact(k, *n1)), b.fact(sokoban_clear_fact(*n2))},
                         {p_to, b.fact(sokoban_box_fact(k, *n2)), b.fact(sokoban_clear_fact(c))},
                         {p_from, b.fact(sokoban_box_fact(k, *n1)), b.fact(sokoban_clear_fact(*n2))},
                         1},
            CellMove{d, c, *n1, {k}});
      }
      if (!spec.multi_push) continue;
      auto n3 = geo.neighbor(*n2, d);
      if (!n3 || !free_cell(*n3)) continue;
      for (int j = 1; j <= box_count; ++j) {
        for (int k = 1; k <= box_count; ++k) {
          if (j == k) continue;
          add(GroundAction{"push-" + dir + "-" + std::to_string(c) + "-" + std::to_string(*n1) +
                               "-box" + std::to_string(j) + "-box" + std::to_string(k),
                           {p_from, b.fact(sokoban_box_fact(j, *n1)),
                            b.fact(sokoban_box_fact(k, *n2)), b.fact(sokoban_clear_fact(*n3))},
                           {p_to, b.fact(sokoban_box_fact(j, *n2)),
                            b.fact(sokoban_box_fact(k, *n3)), b.fact(sokoban_clear_fact(c))},
                           {p_from, b.fact(sokoban_box_fact(j, *n1)),
                            b.fact(sokoban_box_fact(k, *n2)), b.fact(sokoban_clear_fact(*n3))},
                           1},
              CellMove{d, c, *n1, {j, k}});
        }
      }
    }
  }

  CompiledDomain out;
  out.kind = DomainKind::kSokoban;
  out.domain = std::move(b).build();
  out.geometry = geo;
  out.moves = std::move(moves);
  State init = out.domain->empty_state();
  init.insert(out.domain->fact(sokoban_player_fact(spec.player)));
  for (int k = 0; k < box_count; ++k) {
    init.insert(out.domain->fact(sokoban_box_fact(k + 1, spec.boxes[static_cast<std::size_t>(k)])));
  }
  for (int c : cells) {
    if (!occupied.contains(c)) init.insert(out.domain->fact(sokoban_clear_fact(c)));
  }
  out.initial = std::move(init);
  for (const auto& assignment : spec.goal_assignments) {
    std::vector<FactId> facts;
    for (int k = 0; k < box_count; ++k) {
      const int cell = spec.storage[static_cast<std::size_t>(assignment[static_cast<std::size_t>(k)])];
      facts.push_back(out.domain->fact(sokoban_box_fact(k + 1, cell)));
    }
    out.goals.push_back(make_goal(std::move(facts)));
  }
  out.goal_labels = detail::default_labels(out.goals.size());
  if (audit) out.warnings = detail::audit_goals(out);
  return out;
}

/// Admissible, consistent distance-to-goal-cell estimate for compiled grids.
class ManhattanHeuristic {
 public:
  ManhattanHeuristic(const CompiledDomain& compiled, const Goal& goal) {
    if (compiled.kind != DomainKind::kGrid) {
      throw Error(ErrorCode::kInvalidHeuristic,
                  "Manhattan heuristic is only valid for grid navigation domains");
    }
    if (goal.size() != 1) {
      throw Error(ErrorCode::kInvalidHeuristic, "Manhattan heuristic needs a single goal cell");
    }
    geometry_ = compiled.geometry;
    goal_cell_ = static_cast<int>(goal.front().value) + 1;
  }

  int operator()(const State& s) const {
    // Grid facts are interned in cell order, so fact id + 1 is the cell.
    for (FactId f : s.facts()) return geometry_.manhattan(static_cast<int>(f.value) + 1, goal_cell_);
    return 0;
  }

 private:
  GridGeometry geometry_;
  int goal_cell_ = 0;
};

/// Dispatches on a heuristic kind; kManhattan is rejected outside grids.
inline PlanResult plan_in(const CompiledDomain& compiled, const State& from, const Goal& goal,
                          HeuristicKind kind, const PlannerOptions& options = {}) {
  PlanningTask task{*compiled.domain, from, goal};
  if (kind == HeuristicKind::kManhattan) {
    return optimal_plan(task, ManhattanHeuristic(compiled, goal), options);
  }
  return optimal_plan(task, ZeroHeuristic{}, options);
}

}  // namespace xgr

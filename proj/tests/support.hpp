#pragma once

// Shared helpers for the unit and acceptance tests: fixture paths, random
// problem generators and independent oracles.

#include <deque>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "xgr/xgr.hpp"

namespace xgr::testing {

inline std::string fixture(const std::string& name) {
  return std::string(XGR_SCENARIO_DIR) + "/" + name;
}

/// Shortest path length over free cells, written without the STRIPS layer.
inline std::optional<int> bfs_distance(const GridSpec& spec, int from, int to) {
  const int n = spec.width * spec.height;
  std::vector<int> dist(static_cast<std::size_t>(n + 1), -1);
  std::deque<int> q{from};
  dist[static_cast<std::size_t>(from)] = 0;
  while (!q.empty()) {
    const int c = q.front();
    q.pop_front();
    if (c == to) return dist[static_cast<std::size_t>(c)];
    const int r = (c - 1) / spec.width, k = (c - 1) % spec.width;
    const int nbrs[4][2] = {{r - 1, k}, {r + 1, k}, {r, k - 1}, {r, k + 1}};
    for (const auto& nb : nbrs) {
      if (nb[0] < 0 || nb[0] >= spec.height || nb[1] < 0 || nb[1] >= spec.width) continue;
      const int m = nb[0] * spec.width + nb[1] + 1;
      if (spec.blocked.contains(m) || dist[static_cast<std::size_t>(m)] >= 0) continue;
      dist[static_cast<std::size_t>(m)] = dist[static_cast<std::size_t>(c)] + 1;
      q.push_back(m);
    }
  }
  return std::nullopt;
}

/// Random grid with `goals` distinct free goal cells (start excluded).
inline GridSpec random_grid(std::mt19937& rng, int max_w, int max_h, double block_p,
                            std::size_t goals = 1) {
  for (;;) {
    GridSpec spec;
    spec.width = std::uniform_int_distribution<int>(1, max_w)(rng);
    spec.height = std::uniform_int_distribution<int>(1, max_h)(rng);
    std::bernoulli_distribution block(block_p);
    std::vector<int> free;
    for (int c = 1; c <= spec.width * spec.height; ++c) {
      if (block(rng)) {
        spec.blocked.insert(c);
      } else {
        free.push_back(c);
      }
    }
    if (free.size() < goals + 1) continue;
    std::shuffle(free.begin(), free.end(), rng);
    spec.start = free[0];
    spec.goal_cells.assign(free.begin() + 1, free.begin() + 1 + static_cast<long>(goals));
    return spec;
  }
}

/// Random walk of up to `steps` applicable actions.
inline std::vector<ActionId> random_walk(std::mt19937& rng, const CompiledDomain& c,
                                         std::size_t steps) {
  std::vector<ActionId> out;
  State s = c.initial;
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<ActionId> options;
    for (ActionId a : c.domain->actions_by_name()) {
      if (applicable(s, c.domain->action(a))) options.push_back(a);
    }
    if (options.empty()) break;
    const ActionId pick = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    s = apply(s, c.domain->action(pick));
    out.push_back(pick);
  }
  return out;
}

/// Random explanan over the given goal sets with values in [-3, 3].
inline CompleteExplanan random_explanan(std::mt19937& rng, std::size_t predicted,
                                        std::size_t counterfactual, std::size_t observations,
                                        bool coarse = false) {
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  std::uniform_int_distribution<int> step(-6, 6);
  std::bernoulli_distribution keep(0.8);
  std::vector<ExplananEntry> entries;
  for (std::size_t g = 0; g < predicted; ++g) {
    for (std::size_t c = 0; c < counterfactual; ++c) {
      for (std::size_t i = 1; i <= observations; ++i) {
        if (!keep(rng)) continue;
        const double w = coarse ? 0.25 * step(rng) : value(rng);
        entries.push_back({g, predicted + c, i, w});
      }
    }
  }
  if (entries.empty()) entries.push_back({0, predicted, 1, 1.0});
  return make_explanan(std::move(entries), observations);
}

}  // namespace xgr::testing

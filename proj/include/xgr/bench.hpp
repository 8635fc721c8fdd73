#pragma once

// Wall-clock timing of recognition plus explanation over a scenario directory,
// summarised per domain group as mean (sd) with the explanation overhead and
// the share of it spent planning counterfactual actions.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xgr/error.hpp"
#include "xgr/explainer.hpp"
#include "xgr/recognizer.hpp"
#include "xgr/scenario.hpp"

namespace xgr {

struct ScenarioRun {
  std::string file;
  std::string name;
  std::string group;
  bool ok = false;
  std::string error;
  double total_seconds = 0.0;
  double xgr_seconds = 0.0;
  double counterfactual_seconds = 0.0;
  std::string why_text;
  std::string whynot_text;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return r;
}

struct TimingReport {
  std::string group;
  std::size_t scenarios = 0;
  MeanSd total_with_xgr;
  MeanSd xgr_only;
  /// Explanation time relative to recognition time alone.
  double time_increase_pct = 0.0;
  /// Share of explanation time spent in counterfactual planning.
  double counterfactual_planning_pct = 0.0;
};

struct BenchOptions {
  PlannerOptions planner;
  bool collect_timing = true;
};

struct BenchResult {
  std::vector<ScenarioRun> runs;
  std::vector<TimingReport> reports;
  double wall_seconds = 0.0;

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const auto& r) { return !r.ok; }));
  }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

inline void run_one(const LoadedScenario& loaded, const BenchOptions& options, ScenarioRun& run) {
  const GrProblem& problem = loaded.problem;
  std::chrono::nanoseconds cf_time{0};

  const auto t0 = Clock::now();
  MirrorOptions mirror;
  mirror.planner = options.planner;
  const PosteriorTrace trace = mirror_posteriors(problem, mirror);
  const auto t1 = Clock::now();

  const CompleteExplanan ex = build_explanan(trace);
  if (!ex.empty_counterfactual_set && !ex.empty()) {
    run.why_text = explain_why(problem, ex).rendered;
    ExplainOptions eo;
    eo.planner = options.planner;
    if (options.collect_timing) eo.counterfactual_planning_time = &cf_time;
    run.whynot_text = explain_why_not(problem, ex, std::nullopt, eo).rendered;
  }
  rank_observations(ex);
  const auto t2 = Clock::now();

  if (options.collect_timing) {
    run.total_seconds = seconds(t2 - t0);
    run.xgr_seconds = seconds(t2 - t1);
    run.counterfactual_seconds = std::min(seconds(cf_time), run.xgr_seconds);
  }
}

}  // namespace detail

inline std::vector<TimingReport> summarise(const std::vector<ScenarioRun>& runs) {
  std::map<std::string, std::vector<const ScenarioRun*>> groups;
  for (const auto& r : runs) {
    if (r.ok) groups[r.group].push_back(&r);
  }
  std::vector<TimingReport> out;
  for (const auto& [group, members] : groups) {
    TimingReport t;
    t.group = group;
    t.scenarios = members.size();
    std::vector<double> total, xgr;
    double recognition_sum = 0.0, xgr_sum = 0.0, cf_sum = 0.0;
    for (const auto* r : members) {
      total.push_back(r->total_seconds);
      xgr.push_back(r->xgr_seconds);
      recognition_sum += r->total_seconds - r->xgr_seconds;
      xgr_sum += r->xgr_seconds;
      cf_sum += r->counterfactual_seconds;
    }
    t.total_with_xgr = mean_sd(total);
    t.xgr_only = mean_sd(xgr);
    t.time_increase_pct = recognition_sum > 0.0 ? 100.0 * xgr_sum / recognition_sum : 0.0;
    t.counterfactual_planning_pct =
        xgr_sum > 0.0 ? std::clamp(100.0 * cf_sum / xgr_sum, 0.0, 100.0) : 0.0;
    out.push_back(t);
  }
  return out;
}

/// Runs every *.json scenario in `dir`. A failing scenario is recorded and the
/// run continues.
inline BenchResult run_bench(const std::string& dir, const BenchOptions& options = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kValidationError, "'" + dir + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  BenchResult result;
  const auto started = detail::Clock::now();
  for (const auto& path : files) {
    ScenarioRun run;
    run.file = path.filename().string();
    run.name = path.stem().string();
    try {
      const LoadedScenario loaded = load_scenario(path.string(), false);
      if (!loaded.scenario.name.empty()) run.name = loaded.scenario.name;
      run.group = loaded.scenario.group;
      detail::run_one(loaded, options, run);
      run.ok = true;
    } catch (const std::exception& e) {
      run.error = e.what();
    }
    result.runs.push_back(std::move(run));
  }
  result.wall_seconds = detail::seconds(detail::Clock::now() - started);
  std::stable_sort(result.runs.begin(), result.runs.end(),
                   [](const auto& a, const auto& b) { return a.name < b.name; });
  result.reports = summarise(result.runs);
  return result;
}

}  // namespace xgr

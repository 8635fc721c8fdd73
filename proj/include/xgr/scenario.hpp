#pragma once

// Scenario, annotation and prior files (JSON).
//
// A scenario names a domain kind and its layout, the goal hypotheses
// and the observed actions. Grid and Sokoban boards may be written as ASCII
// maps:
//
//   #  wall / blocked cell       @  start (grid) or player (Sokoban)
//   $  box (numbered box1, box2, ... in reading order)
//   1-9  goal cell (grid) or storage cell (Sokoban), by label
//   .  free cell
//
// Observations are action names, or for grid and Sokoban also plain direction
// words ("up", "left", ...) resolved against the current state.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "xgr/domains.hpp"
#include "xgr/error.hpp"
#include "xgr/recognizer.hpp"
#include "xgr/strips.hpp"

namespace xgr {

using Json = nlohmann::ordered_json;

struct StripsActionSpec {
  std::string name;
  std::vector<std::string> pre;
  std::vector<std::string> add;
  std::vector<std::string> del;
};

struct StripsSpec {
  std::vector<std::string> facts;
  std::vector<StripsActionSpec> actions;
  std::vector<std::string> initial;
  std::vector<std::vector<std::string>> goals;
};

struct Scenario {
  std::string name;
  /// Grouping key for reports; defaults to the kind name.
  std::string group;
  DomainKind kind = DomainKind::kGrid;
  std::variant<GridSpec, SokobanSpec, StripsSpec> spec;
  std::vector<std::string> goal_labels;
  /// As written in the file (action names or direction words).
  std::vector<std::string> observations;
};

struct LoadedScenario {
  Scenario scenario;
  CompiledDomain compiled;
  GrProblem problem;
};

inline CompiledDomain compile_strips(const StripsSpec& spec, bool audit = true) {
  DomainBuilder b;
  std::set<std::string> declared;
  for (const auto& f : spec.facts) {
    if (!declared.insert(f).second) {
      throw Error(ErrorCode::kMalformedDomain, "duplicate fact '" + f + "'");
    }
    b.fact(f);
  }
  auto lookup = [&](const std::string& f, const std::string& where) {
    if (!declared.contains(f)) {
      throw Error(ErrorCode::kMalformedDomain, where + " references undeclared fact '" + f + "'");
    }
    return b.fact(f);
  };
  for (const auto& a : spec.actions) {
    GroundAction g{a.name, {}, {}, {}, 1};
    const std::string where = "action '" + a.name + "'";
    for (const auto& f : a.pre) g.preconditions.push_back(lookup(f, where));
    for (const auto& f : a.add) g.add_effects.push_back(lookup(f, where));
    for (const auto& f : a.del) g.delete_effects.push_back(lookup(f, where));
    b.action(std::move(g));
  }
  std::vector<FactId> init;
  for (const auto& f : spec.initial) init.push_back(lookup(f, "initial state"));
  std::vector<Goal> goals;
  for (const auto& g : spec.goals) {
    std::vector<FactId> facts;
    for (const auto& f : g) facts.push_back(lookup(f, "goal"));
    goals.push_back(make_goal(std::move(facts)));
  }
  if (goals.empty()) throw Error(ErrorCode::kMalformedSpec, "no goals");

  CompiledDomain out;
  out.kind = DomainKind::kStrips;
  out.domain = std::move(b).build();
  out.initial = out.domain->make_state(init);
  out.goals = std::move(goals);
  out.goal_labels = detail::default_labels(out.goals.size());
  if (audit) out.warnings = detail::audit_goals(out);
  return out;
}

namespace detail {

/// JSON accessors that report the offending field path.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::string where = path_;
    if (!key.empty()) where += where.empty() ? key : "." + key;
    throw Error(ErrorCode::kParseError, "field '" + (where.empty() ? "<root>" : where) + "': " + what);
  }

  const Json& get(const std::string& key) const {
    if (!j_.contains(key)) fail(key, "missing");
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  int integer(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::vector<int> ints(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_array()) fail(key, "expected a list of integers");
    std::vector<int> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) fail(key, "expected a list of integers");
      out.push_back(x.get<int>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key) const {
    const auto& v = get(key);
    if (!v.is_array()) fail(key, "expected a list of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(key, "expected a list of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

 private:
  const Json& j_;
  std::string path_;
};

inline Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(line) + ":" +
                                            std::to_string(col) + ": malformed JSON");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct AsciiMap {
  int width = 0;
  int height = 0;
  std::set<int> walls;
  std::optional<int> at;
  std::vector<int> boxes;
  std::map<int, int> labelled;  // digit label -> cell
};

inline AsciiMap parse_map(const Fields& f) {
  const auto rows = f.strings("map");
  if (rows.empty()) f.fail("map", "empty map");
  AsciiMap m;
  m.height = static_cast<int>(rows.size());
  m.width = static_cast<int>(rows.front().size());
  for (int r = 0; r < m.height; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != m.width) {
      f.fail("map", "row " + std::to_string(r + 1) + " has length " + std::to_string(row.size()) +
                        ", expected " + std::to_string(m.width));
    }
    for (int c = 0; c < m.width; ++c) {
      const int cell = r * m.width + c + 1;
      const char ch = row[static_cast<std::size_t>(c)];
      if (ch == '#') {
        m.walls.insert(cell);
      } else if (ch == '@') {
        if (m.at) f.fail("map", "more than one '@'");
        m.at = cell;
      } else if (ch == '$') {
        m.boxes.push_back(cell);
      } else if (ch >= '1' && ch <= '9') {
        if (!m.labelled.emplace(ch - '0', cell).second) {
          f.fail("map", std::string("label '") + ch + "' used twice");
        }
      } else if (ch != '.' && ch != ' ') {
        f.fail("map", "row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                          ": unknown symbol '" + std::string(1, ch) + "'");
      }
    }
  }
  if (!m.at) f.fail("map", "no '@' start cell");
  return m;
}

inline GridSpec parse_grid(const Fields& f) {
  GridSpec spec;
  if (f.has("map")) {
    const auto m = parse_map(f);
    if (!m.boxes.empty()) f.fail("map", "'$' is not allowed in a grid map");
    spec.width = m.width;
    spec.height = m.height;
    spec.blocked = m.walls;
    spec.start = *m.at;
    for (const auto& [label, cell] : m.labelled) spec.goal_cells.push_back(cell);
    return spec;
  }
  spec.width = f.integer("width");
  spec.height = f.integer("height");
  if (f.has("blocked")) {
    const auto b = f.ints("blocked");
    spec.blocked.insert(b.begin(), b.end());
  }
  spec.start = f.integer("start");
  spec.goal_cells = f.ints("goals");
  return spec;
}

inline SokobanSpec parse_sokoban(const Fields& f) {
  SokobanSpec spec;
  spec.multi_push = f.boolean("multi_push", false);
  // Storage is indexed by label (map digits) or by list position + 1.
  std::map<int, std::size_t> storage_index;
  if (f.has("map")) {
    const auto m = parse_map(f);
    spec.width = m.width;
    spec.height = m.height;
    spec.walls = m.walls;
    spec.player = *m.at;
    spec.boxes = m.boxes;
    for (const auto& [label, cell] : m.labelled) {
      storage_index[label] = spec.storage.size();
      spec.storage.push_back(cell);
    }
  } else {
    spec.width = f.integer("width");
    spec.height = f.integer("height");
    if (f.has("walls")) {
      const auto w = f.ints("walls");
      spec.walls.insert(w.begin(), w.end());
    }
    spec.player = f.integer("player");
    spec.boxes = f.ints("boxes");
    spec.storage = f.ints("storage");
    for (std::size_t i = 0; i < spec.storage.size(); ++i) {
      storage_index[static_cast<int>(i + 1)] = i;
    }
  }
  const auto& goals = f.get("goals");
  if (!goals.is_array()) f.fail("goals", "expected a list of storage-label lists");
  for (std::size_t g = 0; g < goals.size(); ++g) {
    const auto& labels = goals[g];
    const std::string key = "goals[" + std::to_string(g) + "]";
    if (!labels.is_array()) f.fail(key, "expected a list of storage labels, one per box");
    std::vector<int> assignment;
    for (const auto& l : labels) {
      if (!l.is_number_integer()) f.fail(key, "storage labels must be integers");
      auto it = storage_index.find(l.get<int>());
      if (it == storage_index.end()) {
        f.fail(key, "unknown storage label " + std::to_string(l.get<int>()));
      }
      assignment.push_back(static_cast<int>(it->second));
    }
    spec.goal_assignments.push_back(std::move(assignment));
  }
  return spec;
}

inline StripsSpec parse_strips(const Fields& f) {
  StripsSpec spec;
  spec.facts = f.strings("facts");
  const auto& actions = f.get("actions");
  if (!actions.is_array()) f.fail("actions", "expected a list of actions");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    Fields a(actions[i], f.path("actions[" + std::to_string(i) + "]"));
    StripsActionSpec s;
    s.name = a.string("name");
    if (a.has("pre")) s.pre = a.strings("pre");
    if (a.has("add")) s.add = a.strings("add");
    if (a.has("del")) s.del = a.strings("del");
    spec.actions.push_back(std::move(s));
  }
  spec.initial = f.strings("initial");
  const auto& goals = f.get("goals");
  if (!goals.is_array()) f.fail("goals", "expected a list of fact lists");
  for (std::size_t g = 0; g < goals.size(); ++g) {
    if (!goals[g].is_array()) f.fail("goals[" + std::to_string(g) + "]", "expected a fact list");
    std::vector<std::string> facts;
    for (const auto& x : goals[g]) {
      if (!x.is_string()) f.fail("goals[" + std::to_string(g) + "]", "facts must be strings");
      facts.push_back(x.get<std::string>());
    }
    spec.goals.push_back(std::move(facts));
  }
  return spec;
}

/// Resolves an observation token to an action applicable in `state`.
inline ActionId resolve_observation(const CompiledDomain& c, const State& state,
                                    const std::string& token, std::size_t index) {
  const auto& d = *c.domain;
  auto where = [&] { return "observation " + std::to_string(index) + " ('" + token + "')"; };
  if (auto id = d.find_action(token)) {
    if (!applicable(state, d.action(*id))) {
      throw Error(ErrorCode::kValidationError, where() + " is not applicable");
    }
    return *id;
  }
  if (auto dir = parse_direction(token); dir && c.kind != DomainKind::kStrips) {
    for (ActionId id : d.actions_by_name()) {
      const auto& m = c.moves[id.value];
      if (m && m->direction == *dir && applicable(state, d.action(id))) return id;
    }
    throw Error(ErrorCode::kValidationError, where() + " is not applicable");
  }
  throw Error(ErrorCode::kValidationError, where() + " names an unknown action");
}

}  // namespace detail

inline Scenario parse_scenario(const Json& j) {
  detail::Fields f(j, "");
  Scenario s;
  s.name = f.has("name") ? f.string("name") : "";
  const std::string kind = f.string("kind");
  if (kind == "grid") {
    s.kind = DomainKind::kGrid;
    s.spec = detail::parse_grid(f);
  } else if (kind == "sokoban") {
    s.kind = DomainKind::kSokoban;
    s.spec = detail::parse_sokoban(f);
  } else if (kind == "strips") {
    s.kind = DomainKind::kStrips;
    s.spec = detail::parse_strips(f);
  } else {
    f.fail("kind", "expected one of grid, sokoban, strips");
  }
  s.group = f.has("domain") ? f.string("domain") : std::string(to_string(s.kind));
  if (f.has("goal_labels")) s.goal_labels = f.strings("goal_labels");
  s.observations = f.has("observations") ? f.strings("observations") : std::vector<std::string>{};
  return s;
}

inline Scenario parse_scenario(const std::string& text, const std::string& origin) {
  return parse_scenario(detail::parse_json(text, origin));
}

/// Compiles the domain and validates the observation chain.
inline LoadedScenario build_scenario(Scenario s, bool audit = true) {
  LoadedScenario out;
  try {
    switch (s.kind) {
      case DomainKind::kGrid: out.compiled = compile_grid(std::get<GridSpec>(s.spec), audit); break;
      case DomainKind::kSokoban:
        out.compiled = compile_sokoban(std::get<SokobanSpec>(s.spec), audit);
        break;
      case DomainKind::kStrips:
        out.compiled = compile_strips(std::get<StripsSpec>(s.spec), audit);
        break;
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidationError, e.what());
  }
  if (!s.goal_labels.empty()) {
    if (s.goal_labels.size() != out.compiled.goals.size()) {
      throw Error(ErrorCode::kValidationError, "goal_labels has " +
                                                   std::to_string(s.goal_labels.size()) +
                                                   " entries for " +
                                                   std::to_string(out.compiled.goals.size()) +
                                                   " goals");
    }
    out.compiled.goal_labels = s.goal_labels;
  }
  std::vector<ActionId> actions;
  State state = out.compiled.initial;
  for (std::size_t i = 0; i < s.observations.size(); ++i) {
    const ActionId a = detail::resolve_observation(out.compiled, state, s.observations[i], i + 1);
    state = apply(state, out.compiled.domain->action(a));
    actions.push_back(a);
  }
  out.problem = make_problem(out.compiled, actions);
  out.scenario = std::move(s);
  return out;
}

inline LoadedScenario load_scenario(const std::string& path, bool audit = true) {
  return build_scenario(parse_scenario(detail::read_file(path), path), audit);
}

/// Explicit (map-free) JSON form; observations are written as action names.
inline Json to_json(const LoadedScenario& loaded) {
  const Scenario& s = loaded.scenario;
  Json j;
  j["name"] = s.name;
  j["kind"] = std::string(to_string(s.kind));
  j["domain"] = s.group;
  if (const auto* g = std::get_if<GridSpec>(&s.spec)) {
    j["width"] = g->width;
    j["height"] = g->height;
    j["blocked"] = std::vector<int>(g->blocked.begin(), g->blocked.end());
    j["start"] = g->start;
    j["goals"] = g->goal_cells;
  } else if (const auto* k = std::get_if<SokobanSpec>(&s.spec)) {
    j["width"] = k->width;
    j["height"] = k->height;
    j["walls"] = std::vector<int>(k->walls.begin(), k->walls.end());
    j["player"] = k->player;
    j["boxes"] = k->boxes;
    j["storage"] = k->storage;
    Json goals = Json::array();
    for (const auto& a : k->goal_assignments) {
      Json labels = Json::array();
      for (int idx : a) labels.push_back(idx + 1);
      goals.push_back(labels);
    }
    j["goals"] = goals;
    j["multi_push"] = k->multi_push;
  } else {
    const auto& t = std::get<StripsSpec>(s.spec);
    j["facts"] = t.facts;
    Json actions = Json::array();
    for (const auto& a : t.actions) {
      actions.push_back({{"name", a.name}, {"pre", a.pre}, {"add", a.add}, {"del", a.del}});
    }
    j["actions"] = actions;
    j["initial"] = t.initial;
    j["goals"] = t.goals;
  }
  j["goal_labels"] = loaded.problem.goal_labels;
  Json obs = Json::array();
  for (const auto& o : loaded.problem.observations) obs.push_back(loaded.problem.domain->action(o.action).name);
  j["observations"] = obs;
  return j;
}

inline std::string serialize(const LoadedScenario& loaded) { return to_json(loaded).dump(2) + "\n"; }

/// Same domain, initial state, goals and observation chain.
inline bool same_problem(const GrProblem& a, const GrProblem& b) {
  return *a.domain == *b.domain && a.initial == b.initial && a.goals == b.goals &&
         a.goal_labels == b.goal_labels && a.observations == b.observations;
}

// --- annotations and priors ---------------------------------------------------

struct Annotation {
  std::string scenario;
  /// Observation index (1-based) -> rank.
  std::map<std::size_t, int> why_ranks;
  std::map<std::size_t, int> whynot_ranks;
  /// Counterfactual goal label -> action name.
  std::map<std::string, std::string> counterfactual_actions;
};

namespace detail {

inline std::size_t observation_key(const std::string& key, const std::string& field) {
  std::string digits = key;
  if (!digits.empty() && (digits[0] == 'o' || digits[0] == 'O')) digits.erase(0, 1);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
    throw Error(ErrorCode::kParseError,
                "field '" + field + "': bad observation key '" + key + "' (use o<i> or <i>)");
  }
  const auto i = std::stoul(digits);
  if (i == 0) throw Error(ErrorCode::kParseError, "field '" + field + "': observations are 1-based");
  return i;
}

inline std::map<std::size_t, int> parse_ranks(const Json& j, const std::string& field) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "field '" + field + "': expected an object");
  std::map<std::size_t, int> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number_integer() || v.get<int>() < 0) {
      throw Error(ErrorCode::kParseError,
                  "field '" + field + "." + k + "': ranks are nonnegative integers");
    }
    out[observation_key(k, field)] = v.get<int>();
  }
  return out;
}

}  // namespace detail

inline Annotation parse_annotation(const std::string& text, const std::string& origin) {
  const Json j = detail::parse_json(text, origin);
  detail::Fields f(j, "");
  Annotation a;
  if (f.has("scenario")) a.scenario = f.string("scenario");
  if (f.has("why_ranks")) a.why_ranks = detail::parse_ranks(j.at("why_ranks"), "why_ranks");
  if (f.has("whynot_ranks")) a.whynot_ranks = detail::parse_ranks(j.at("whynot_ranks"), "whynot_ranks");
  if (f.has("counterfactual_actions")) {
    const auto& cf = j.at("counterfactual_actions");
    if (!cf.is_object()) f.fail("counterfactual_actions", "expected an object");
    for (const auto& [k, v] : cf.items()) {
      if (!v.is_string()) f.fail("counterfactual_actions." + k, "expected an action name");
      a.counterfactual_actions[k] = v.get<std::string>();
    }
  }
  return a;
}

inline Annotation load_annotation(const std::string& path) {
  return parse_annotation(detail::read_file(path), path);
}

/// Priors as a list in goal order or an object keyed by goal label.
inline std::vector<double> parse_priors(const std::string& text, const std::string& origin,
                                        const std::vector<std::string>& goal_labels) {
  Json j = detail::parse_json(text, origin);
  if (j.is_object() && j.contains("priors")) j = j.at("priors");
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw Error(ErrorCode::kParseError, "field 'priors': expected numbers");
      out.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    for (const auto& label : goal_labels) {
      if (!j.contains(label) || !j.at(label).is_number()) {
        throw Error(ErrorCode::kParseError, "field 'priors." + label + "': missing or not a number");
      }
      out.push_back(j.at(label).get<double>());
    }
  } else {
    throw Error(ErrorCode::kParseError, "field 'priors': expected a list or an object");
  }
  if (out.size() != goal_labels.size()) {
    throw Error(ErrorCode::kValidationError, "prior count does not match goal count");
  }
  return out;
}

inline std::vector<double> load_priors(const std::string& path,
                                       const std::vector<std::string>& goal_labels) {
  return parse_priors(detail::read_file(path), path, goal_labels);
}

}  // namespace xgr

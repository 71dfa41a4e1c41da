#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "semplan/dfa.hpp"
#include "semplan/error.hpp"
#include "semplan/executor.hpp"
#include "semplan/model.hpp"
#include "semplan/planner.hpp"
#include "semplan/product.hpp"

namespace semplan {

using json = nlohmann::json;

struct BeliefLetter {
  std::vector<std::string> set;
  double p = 0.0;
  bool operator==(const BeliefLetter&) const = default;
};

struct BeliefEntry {
  Cell cell;
  std::vector<BeliefLetter> letters;
  bool operator==(const BeliefEntry&) const = default;
};

struct TruthEntry {
  Cell cell;
  std::vector<std::string> set;
  bool operator==(const TruthEntry&) const = default;
};

/// Contents of a map file, before model construction.
struct MapSpec {
  int width = 1;
  int height = 1;
  std::vector<Cell> blocked;
  std::vector<std::string> alphabet;
  std::vector<BeliefEntry> belief;  // omitted cells: empty letter with probability 1
  std::optional<std::vector<TruthEntry>> truth;
  Cell start;
  unsigned sensor_range = 1;
  double cost = 1.0;
  bool operator==(const MapSpec&) const = default;
};

/// A map file turned into model objects.
struct Scene {
  MapSpec spec;
  PlDmdp model;
  Belief belief;
  std::optional<Environment> environment;
  StateId start = 0;
};

namespace detail {

inline std::string ptr_join(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string ptr_join(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

inline const json& member(const json& j, const std::string& key, const std::string& ptr) {
  if (!j.is_object()) throw SchemaError(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(ptr_join(ptr, key), "missing required field");
  return *it;
}

inline int as_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return j.get<int>();
}

inline double as_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected a number");
  return j.get<double>();
}

inline std::string as_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw SchemaError(ptr, "expected a string");
  return j.get<std::string>();
}

inline const json& as_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array");
  return j;
}

inline Cell as_cell(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(ptr, "expected a cell [x, y]");
  return {as_int(j[0], ptr_join(ptr, 0)), as_int(j[1], ptr_join(ptr, 1))};
}

inline std::vector<std::string> as_names(const json& j, const std::string& ptr) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < as_array(j, ptr).size(); ++i) out.push_back(as_string(j[i], ptr_join(ptr, i)));
  return out;
}

inline std::string cell_name(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

}  // namespace detail

inline MapSpec parse_map(const json& j) {
  using namespace detail;
  MapSpec m;
  const json& grid = member(j, "grid", "");
  m.width = as_int(member(grid, "width", "/grid"), "/grid/width");
  m.height = as_int(member(grid, "height", "/grid"), "/grid/height");
  if (m.width < 1) throw SchemaError("/grid/width", "must be at least 1");
  if (m.height < 1) throw SchemaError("/grid/height", "must be at least 1");
  if (grid.contains("blocked")) {
    const json& bl = as_array(grid["blocked"], "/grid/blocked");
    for (std::size_t i = 0; i < bl.size(); ++i) m.blocked.push_back(as_cell(bl[i], ptr_join("/grid/blocked", i)));
  }
  m.alphabet = as_names(member(j, "alphabet", ""), "/alphabet");
  if (j.contains("belief")) {
    const json& bel = as_array(j["belief"], "/belief");
    for (std::size_t i = 0; i < bel.size(); ++i) {
      const std::string row = ptr_join("/belief", i);
      BeliefEntry e;
      e.cell = as_cell(member(bel[i], "cell", row), row + "/cell");
      const json& letters = as_array(member(bel[i], "letters", row), row + "/letters");
      for (std::size_t k = 0; k < letters.size(); ++k) {
        const std::string lp = ptr_join(row + "/letters", k);
        e.letters.push_back({as_names(member(letters[k], "set", lp), lp + "/set"),
                             as_number(member(letters[k], "p", lp), lp + "/p")});
      }
      m.belief.push_back(std::move(e));
    }
  }
  if (j.contains("truth")) {
    const json& tr = as_array(j["truth"], "/truth");
    std::vector<TruthEntry> truth;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const std::string row = ptr_join("/truth", i);
      truth.push_back({as_cell(member(tr[i], "cell", row), row + "/cell"),
                       as_names(member(tr[i], "set", row), row + "/set")});
    }
    m.truth = std::move(truth);
  }
  m.start = j.contains("start") ? as_cell(j["start"], "/start") : Cell{0, 0};
  if (j.contains("sensor_range")) {
    const int h = as_int(j["sensor_range"], "/sensor_range");
    if (h < 0) throw SchemaError("/sensor_range", "must be non-negative");
    m.sensor_range = static_cast<unsigned>(h);
  }
  if (j.contains("cost")) {
    m.cost = as_number(j["cost"], "/cost");
    if (!(m.cost > 0.0)) throw SchemaError("/cost", "must be positive");
  }
  return m;
}

inline json to_json(const MapSpec& m) {
  auto cell = [](Cell c) { return json::array({c.x, c.y}); };
  json j;
  j["grid"] = {{"width", m.width}, {"height", m.height}, {"blocked", json::array()}};
  for (const Cell& c : m.blocked) j["grid"]["blocked"].push_back(cell(c));
  j["alphabet"] = m.alphabet;
  j["belief"] = json::array();
  for (const auto& e : m.belief) {
    json letters = json::array();
    for (const auto& l : e.letters) letters.push_back({{"set", l.set}, {"p", l.p}});
    j["belief"].push_back({{"cell", cell(e.cell)}, {"letters", letters}});
  }
  if (m.truth) {
    j["truth"] = json::array();
    for (const auto& t : *m.truth) j["truth"].push_back({{"cell", cell(t.cell)}, {"set", t.set}});
  }
  j["start"] = cell(m.start);
  j["sensor_range"] = m.sensor_range;
  j["cost"] = m.cost;
  return j;
}

inline Scene instantiate(const MapSpec& spec) {
  using detail::cell_name;
  using detail::ptr_join;
  Alphabet alphabet;
  try {
    alphabet = Alphabet(spec.alphabet);
  } catch (const ModelError& e) {
    throw SchemaError("/alphabet", e.what());
  }
  for (std::size_t i = 0; i < spec.blocked.size(); ++i) {
    const Cell c = spec.blocked[i];
    if (c.x < 0 || c.y < 0 || c.x >= spec.width || c.y >= spec.height) {
      throw SchemaError(ptr_join("/grid/blocked", i), "cell " + cell_name(c) + " outside the grid");
    }
  }
  std::optional<PlDmdp> model;
  try {
    model.emplace(grid_world(spec.width, spec.height, spec.blocked, alphabet, spec.cost));
  } catch (const ModelError& e) {
    throw SchemaError("/grid", e.what());
  }
  const GridLayout& g = *model->grid();
  auto state_of = [&](Cell c, const std::string& ptr) {
    auto s = g.state_at(c);
    if (!s) throw SchemaError(ptr, "cell " + cell_name(c) + " is outside the grid or blocked");
    return *s;
  };
  auto letter_of = [&](const std::vector<std::string>& names, const std::string& ptr) {
    Letter l;
    for (std::size_t k = 0; k < names.size(); ++k) {
      auto o = alphabet.find(names[k]);
      if (!o) throw SchemaError(ptr_join(ptr, k), "unknown observation '" + names[k] + "'");
      l = l.with(*o);
    }
    return l;
  };

  Belief belief(model->state_count(), alphabet);
  std::vector<bool> seen(model->state_count(), false);
  for (std::size_t i = 0; i < spec.belief.size(); ++i) {
    const std::string row = ptr_join("/belief", i);
    const auto& e = spec.belief[i];
    const StateId x = state_of(e.cell, row + "/cell");
    if (seen[x]) throw SchemaError(row + "/cell", "cell " + cell_name(e.cell) + " listed twice");
    seen[x] = true;
    std::vector<LetterProb> dist;
    double total = 0.0;
    for (std::size_t k = 0; k < e.letters.size(); ++k) {
      const std::string lp = ptr_join(row + "/letters", k);
      const double p = e.letters[k].p;
      if (!(p >= 0.0 && p <= 1.0)) throw SchemaError(lp + "/p", "probability outside [0, 1]");
      dist.push_back({letter_of(e.letters[k].set, lp + "/set"), p});
      total += p;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      std::ostringstream msg;
      msg << "belief of cell " << cell_name(e.cell) << " sums to " << total << ", expected 1";
      throw SchemaError(row + "/letters", msg.str());
    }
    belief.set(x, std::move(dist));
  }

  std::optional<Environment> env;
  if (spec.truth) {
    Environment e;
    e.sensor_range = spec.sensor_range;
    e.truth.assign(model->state_count(), Letter{});
    std::vector<bool> covered(model->state_count(), false);
    for (std::size_t i = 0; i < spec.truth->size(); ++i) {
      const std::string row = ptr_join("/truth", i);
      const auto& t = (*spec.truth)[i];
      const StateId x = state_of(t.cell, row + "/cell");
      if (covered[x]) throw SchemaError(row + "/cell", "cell " + cell_name(t.cell) + " listed twice");
      covered[x] = true;
      e.truth[x] = letter_of(t.set, row + "/set");
    }
    env = std::move(e);
  }
  const StateId start = state_of(spec.start, "/start");
  return Scene{spec, std::move(*model), std::move(belief), std::move(env), start};
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", path.string() + ": " + e.what());
  }
}

inline Scene load_map(const std::filesystem::path& path) { return instantiate(parse_map(read_json_file(path))); }

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// Output documents

inline json dfa_to_json(const TotalDfa& dfa) {
  const Alphabet& ab = dfa.alphabet();
  json j;
  j["alphabet"] = ab.names();
  j["initial"] = dfa.initial();
  j["states"] = json::array();
  for (DfaStateId s = 0; s < dfa.size(); ++s) {
    j["states"].push_back({{"id", s},
                           {"formula", to_string(dfa.label(s), ab)},
                           {"accepting", dfa.accepting(s)},
                           {"trash", dfa.is_trash(s)}});
  }
  j["transitions"] = json::array();
  for (DfaStateId s = 0; s < dfa.size(); ++s) {
    for (std::uint32_t bits = 0; bits < dfa.letter_count(); ++bits) {
      j["transitions"].push_back({{"from", s}, {"letter", ab.names_of(Letter(bits))}, {"to", dfa.next(s, Letter(bits))}});
    }
  }
  return j;
}

inline std::string dfa_to_dot(const TotalDfa& dfa) {
  const Alphabet& ab = dfa.alphabet();
  std::ostringstream out;
  out << "digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n";
  for (DfaStateId s = 0; s < dfa.size(); ++s) {
    std::string label = to_string(dfa.label(s), ab);
    for (std::size_t i = 0; i < label.size(); ++i) {
      if (label[i] == '"') label.insert(i++, 1, '\\');
    }
    out << "  s" << s << " [label=\"" << s << ": " << label << "\", shape="
        << (dfa.accepting(s) ? "doublecircle" : "circle") << "];\n";
  }
  out << "  init -> s" << dfa.initial() << ";\n";
  for (DfaStateId s = 0; s < dfa.size(); ++s) {
    std::vector<std::vector<std::string>> by_target(dfa.size());
    for (std::uint32_t bits = 0; bits < dfa.letter_count(); ++bits) {
      by_target[dfa.next(s, Letter(bits))].push_back(ab.format(Letter(bits)));
    }
    for (DfaStateId t = 0; t < dfa.size(); ++t) {
      if (by_target[t].empty()) continue;
      out << "  s" << s << " -> s" << t << " [label=\"";
      for (std::size_t i = 0; i < by_target[t].size(); ++i) out << (i ? " " : "") << by_target[t][i];
      out << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

inline json product_to_json(const ProductAutomaton& p, const PlDmdp& m) {
  json j;
  j["states"] = p.state_count();
  j["physical_states"] = p.physical_count();
  j["dfa_states"] = p.dfa_state_count();
  j["edges"] = json::array();
  j["accepting"] = json::array();
  j["trash"] = json::array();
  for (ProductStateId s = 0; s < p.state_count(); ++s) {
    if (p.accepting(s)) j["accepting"].push_back(s);
    if (p.trash(s)) j["trash"].push_back(s);
    for (ActionId a = 0; a < p.action_count(); ++a) {
      for (const auto& e : p.successors(s, a)) {
        j["edges"].push_back({{"from", s}, {"action", m.action_name(a)}, {"to", e.state}, {"prob", e.p}});
      }
    }
  }
  return j;
}

inline json plan_to_json(const PlanResult& plan, const ProductAutomaton& p, const PlDmdp& m, double min_value,
                         bool satisfying) {
  json j;
  j["values"] = plan.values.v;
  j["policy"] = json::array();
  for (ProductStateId s = 0; s < p.state_count(); ++s) {
    const auto a = plan.policy.at(s);
    j["policy"].push_back(a ? json(m.action_name(*a)) : json(nullptr));
  }
  j["min_nonterminal_value"] = min_value;
  j["satisfying"] = satisfying;
  j["sweeps"] = plan.sweeps;
  j["residual"] = plan.residual;
  j["physical_states"] = p.physical_count();
  j["dfa_states"] = p.dfa_state_count();
  return j;
}

inline json trace_to_json(const EpisodeTrace& tr, const PlDmdp& m, const TotalDfa& dfa) {
  json j;
  j["outcome"] = to_string(tr.outcome);
  j["actions"] = json::array();
  for (ActionId a : tr.actions) j["actions"].push_back(m.action_name(a));
  j["states"] = json::array();
  for (StateId x : tr.states) {
    if (m.grid()) {
      const Cell c = m.grid()->cells[x];
      j["states"].push_back(json::array({c.x, c.y}));
    } else {
      j["states"].push_back(x);
    }
  }
  j["letters"] = json::array();
  for (Letter l : tr.letters) j["letters"].push_back(m.alphabet().names_of(l));
  j["dfa_states"] = tr.dfa_states;
  j["replans"] = json::array();
  for (const auto& r : tr.replans) {
    j["replans"].push_back({{"t", r.t},
                            {"sweeps", r.sweeps},
                            {"residual", r.residual},
                            {"information_norm", r.information_norm},
                            {"uncertain_before", r.uncertain_before},
                            {"uncertain_after", r.uncertain_after}});
  }
  j["cost"] = tr.cost;
  j["trash_visits"] = tr.trash_visits;
  j["word_accepted"] = check_word(tr, dfa);
  return j;
}

}  // namespace semplan

#pragma once

#include "nfg/canonical.hpp"
#include "nfg/dynamics.hpp"
#include "nfg/io.hpp"
#include "nfg/metrics.hpp"
#include "nfg/monetary_game.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nfg::scenario {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Malformed or infeasible scenario; the runner exits with status 2 and writes nothing.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Assertion {
  std::string text;
  std::string key;
  std::string op;
  std::string expected;
};

struct EnumerateSettings {
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool transfers = false;
};

struct DynamicsSettings {
  DynamicsConfig config;
  bool random_order = false;
  bool shuffle_arrivals = false;
  std::size_t trials = 1;
  bool fit_tail = false;
};

struct CanonicalSettings {
  CanonicalKind kind;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool transfers = false;
};

struct GraphSource {
  std::string name;
  LoadedGraph graph;
};

struct MetricsSettings {
  std::vector<GraphSource> snapshots;
  /// Exactly one of these selects the core.
  std::optional<std::size_t> core_k;
  std::optional<PlayerType> core_type;
  std::optional<std::vector<std::uint64_t>> core_labels;
  std::optional<std::vector<std::uint64_t>> shell_labels;
};

using ModeSettings = std::variant<EnumerateSettings, DynamicsSettings, CanonicalSettings, MetricsSettings>;

struct Scenario {
  std::string name;
  std::string mode;
  GameParams params = GameParams::uniform(Rational(1), Rational(2));
  std::uint64_t seed = 0;
  std::string hash;
  Json document;
  ModeSettings settings;
  std::vector<Assertion> assertions;
};

/// Result values rendered as text, in insertion order; rationals are exact `p/q`.
class Results {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : items_)
      if (k == key) {
        v = value;
        return;
      }
    items_.emplace_back(key, value);
  }
  void set(const std::string& key, const Rational& value) { set(key, to_string(value)); }
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
  void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    set(key, std::string(buf));
  }

  [[nodiscard]] const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : items_)
      if (k == key) return &v;
    return nullptr;
  }
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& items() const noexcept { return items_; }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

struct AssertionOutcome {
  std::string text;
  bool passed = false;
  std::string actual;
};

struct RunOutcome {
  Results results;
  std::vector<AssertionOutcome> assertions;
  /// File name -> contents, written only after the whole run succeeded.
  std::map<std::string, std::string> artifacts;

  [[nodiscard]] bool passed() const {
    for (const auto& a : assertions)
      if (!a.passed) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Parsing

inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline const Json& require(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ScenarioError(where + ": missing key '" + key + "'");
  return obj.at(key);
}

inline std::size_t as_count(const Json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ScenarioError(what + " must be a non-negative integer");
  return v.get<std::size_t>();
}

inline bool as_bool(const Json& v, const std::string& what) {
  if (!v.is_boolean()) throw ScenarioError(what + " must be true or false");
  return v.get<bool>();
}

inline std::string as_string(const Json& v, const std::string& what) {
  if (!v.is_string()) throw ScenarioError(what + " must be a string");
  return v.get<std::string>();
}

/// Rationals may be written as "p/q", decimal strings, or JSON integers.
inline Rational as_rational(const Json& v, const std::string& what) {
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ScenarioError(what + ": " + e.what());
  }
  throw ScenarioError(what + " must be a rational written as a string or an integer");
}

inline std::size_t count_or(const Json& obj, const std::string& key, std::size_t fallback, const std::string& where) {
  return obj.contains(key) ? as_count(obj.at(key), where + "." + key) : fallback;
}

inline bool bool_or(const Json& obj, const std::string& key, bool fallback, const std::string& where) {
  return obj.contains(key) ? as_bool(obj.at(key), where + "." + key) : fallback;
}

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ScenarioError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ScenarioError(where + ": unknown key '" + key + "'");
  }
}

/// Replaces the value at a dotted path, which must already exist; the new text is read
/// according to the old value's JSON type.
inline void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ScenarioError("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (node->is_array()) {
      std::size_t index = 0;
      try {
        index = std::stoul(part);
      } catch (const std::exception&) {
        throw ScenarioError("override path '" + path + "': '" + part + "' is not an index");
      }
      if (index >= node->size()) throw ScenarioError("override path '" + path + "' does not exist");
      node = &(*node)[index];
    } else {
      if (!node->is_object() || !node->contains(part))
        throw ScenarioError("override path '" + path + "' does not exist");
      node = &(*node)[part];
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  try {
    if (node->is_boolean()) {
      if (text != "true" && text != "false") throw ScenarioError("override " + path + " expects true or false");
      *node = text == "true";
    } else if (node->is_number_integer()) {
      std::size_t used = 0;
      const long long v = std::stoll(text, &used);
      if (used != text.size()) throw ScenarioError("override " + path + " expects an integer");
      *node = v;
    } else if (node->is_string()) {
      *node = text;
    } else {
      *node = Json::parse(text);
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError("override " + path + ": " + e.what());
  }
}

inline Assertion parse_assertion(const std::string& text) {
  std::istringstream in(text);
  Assertion a;
  a.text = text;
  in >> a.key >> a.op;
  std::getline(in >> std::ws, a.expected);
  static const std::set<std::string> ops{"==", "!=", "<", "<=", ">", ">="};
  if (a.key.empty() || !ops.contains(a.op) || a.expected.empty())
    throw ScenarioError("assertion '" + text + "' is not 'key op value'");
  return a;
}

inline std::vector<PlayerType> parse_schedule(const std::string& text) {
  std::vector<PlayerType> out;
  for (char c : text) {
    if (c == 'A')
      out.push_back(PlayerType::TypeA);
    else if (c == 'B')
      out.push_back(PlayerType::TypeB);
    else
      throw ScenarioError(std::string("schedule letter must be A or B, got '") + c + "'");
  }
  if (out.empty()) throw ScenarioError("schedule is empty");
  return out;
}

inline CanonicalKind parse_kind(const Json& obj, const std::string& where) {
  const auto name = as_string(require(obj, "kind", where), where + ".kind");
  if (name == "StarOnClique") return StarOnClique{};
  if (name == "FullBipartiteOnClique") return FullBipartiteOnClique{};
  if (name == "FullClique") return FullClique{};
  if (name == "CliqueAbsorbedStar") return CliqueAbsorbedStar{};
  if (name == "LinesOnClique")
    return LinesOnClique{as_count(require(obj, "lines", where), where + ".lines"),
                         as_count(require(obj, "length", where), where + ".length")};
  if (name == "LoopExample") return LoopExample{as_count(require(obj, "length", where), where + ".length")};
  throw ScenarioError(where + ".kind: unknown topology '" + name + "'");
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  return in;
}

inline LoadedGraph load_graph_files(const std::filesystem::path& edges, const std::optional<std::filesystem::path>& types) {
  try {
    std::map<std::uint64_t, PlayerType> type_map;
    if (types) {
      auto in = open_input(*types);
      type_map = read_type_file(in);
    }
    auto in = open_input(edges);
    return read_edge_list(in, type_map);
  } catch (const ParseError& e) {
    throw ScenarioError(edges.string() + ": " + e.what());
  }
}

inline std::vector<std::uint64_t> load_labels(const std::filesystem::path& path) {
  try {
    auto in = open_input(path);
    return read_node_list(in);
  } catch (const ParseError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

inline GraphSource generated_graph(const Json& g, std::uint64_t seed, const std::string& where) {
  reject_unknown(g, {"name", "model", "n", "m0", "links_per_arrival", "links"}, where);
  const auto model = as_string(require(g, "model", where), where + ".model");
  const auto n = as_count(require(g, "n", where), where + ".n");
  GraphSource src;
  src.name = g.contains("name") ? as_string(g.at("name"), where + ".name") : model;
  try {
    if (model == "preferential_attachment") {
      src.graph.topology = preferential_attachment(n, as_count(require(g, "m0", where), where + ".m0"),
                                                   as_count(require(g, "links_per_arrival", where), where + ".links_per_arrival"),
                                                   seed);
    } else if (model == "random") {
      src.graph.topology = random_graph(n, as_count(require(g, "links", where), where + ".links"), seed);
    } else {
      throw ScenarioError(where + ".model: unknown generator '" + model + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(where + ": " + e.what());
  }
  for (NodeId v = 0; v < src.graph.topology.size(); ++v) src.graph.labels.push_back(v);
  return src;
}

inline EnumerateSettings parse_enumerate(const Json& s) {
  reject_unknown(s, {"n_A", "n_B", "transfers"}, "enumerate");
  EnumerateSettings out{as_count(require(s, "n_A", "enumerate"), "enumerate.n_A"),
                        as_count(require(s, "n_B", "enumerate"), "enumerate.n_B"),
                        bool_or(s, "transfers", false, "enumerate")};
  if (out.n_a + out.n_b < 2 || out.n_a + out.n_b > max_enumeration_players)
    throw ScenarioError("enumerate: player count must be between 2 and " + std::to_string(max_enumeration_players));
  return out;
}

inline DynamicsSettings parse_dynamics(const Json& s, bool monetary, std::uint64_t seed) {
  const std::string where = monetary ? "monetary" : "dynamics";
  reject_unknown(s, {"schedule", "rule", "order", "transfers", "preference", "trials", "shuffle_arrivals", "fit_tail",
                     "max_turns"},
                 where);
  DynamicsSettings out;
  auto& cfg = out.config;
  cfg.arrival_schedule = parse_schedule(as_string(require(s, "schedule", where), where + ".schedule"));
  const auto rule = s.contains("rule") ? as_string(s.at("rule"), where + ".rule") : std::string("R2a");
  if (rule == "R2a")
    cfg.rule = DynamicRule::R2a;
  else if (rule == "R2b")
    cfg.rule = DynamicRule::R2b;
  else
    throw ScenarioError(where + ".rule must be R2a or R2b");
  const auto order = s.contains("order") ? as_string(s.at("order"), where + ".order") : std::string("round_robin");
  if (order == "random")
    out.random_order = true;
  else if (order != "round_robin")
    throw ScenarioError(where + ".order must be round_robin or random");
  cfg.transfers = monetary || bool_or(s, "transfers", false, where);
  if (monetary && s.contains("transfers") && !as_bool(s.at("transfers"), where + ".transfers"))
    throw ScenarioError("monetary scenarios always use transfers");
  const auto pref = s.contains("preference") ? as_string(s.at("preference"), where + ".preference") : std::string("none");
  if (pref == "none")
    cfg.preference = Preference::None;
  else if (pref == "pref1")
    cfg.preference = Preference::PrefOrder1;
  else if (pref == "pref2")
    cfg.preference = Preference::PrefOrder2;
  else
    throw ScenarioError(where + ".preference must be none, pref1 or pref2");
  if (cfg.preference != Preference::None && !cfg.transfers)
    throw ScenarioError(where + ": a preference order needs transfers");
  cfg.max_turns = count_or(s, "max_turns", 0, where);
  cfg.seed = seed;
  if (out.random_order) cfg.turn_order = UniformRandom{seed};
  out.trials = count_or(s, "trials", 1, where);
  if (out.trials == 0) throw ScenarioError(where + ".trials must be positive");
  out.shuffle_arrivals = bool_or(s, "shuffle_arrivals", false, where);
  out.fit_tail = bool_or(s, "fit_tail", false, where);
  if (out.fit_tail && out.trials < 2) throw ScenarioError(where + ".fit_tail needs at least two trials");
  return out;
}

inline CanonicalSettings parse_canonical(const Json& s) {
  reject_unknown(s, {"kind", "lines", "length", "n_A", "n_B", "transfers"}, "canonical");
  CanonicalSettings out{parse_kind(s, "canonical"), as_count(require(s, "n_A", "canonical"), "canonical.n_A"),
                        as_count(require(s, "n_B", "canonical"), "canonical.n_B"),
                        bool_or(s, "transfers", false, "canonical")};
  try {
    (void)build(out.kind, out.n_a, out.n_b);
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("canonical: ") + e.what());
  }
  return out;
}

inline MetricsSettings parse_metrics(const Json& s, const std::filesystem::path& base, std::uint64_t seed) {
  reject_unknown(s, {"snapshots", "generator", "core", "shell"}, "metrics");
  MetricsSettings out;
  auto resolve = [&](const Json& v, const std::string& what) { return base / as_string(v, what); };
  if (s.contains("snapshots")) {
    const auto& list = s.at("snapshots");
    if (!list.is_array() || list.empty()) throw ScenarioError("metrics.snapshots must be a non-empty list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "metrics.snapshots." + std::to_string(i);
      reject_unknown(list[i], {"name", "edges", "types"}, where);
      GraphSource src;
      src.name = list[i].contains("name") ? as_string(list[i].at("name"), where + ".name") : "snapshot" + std::to_string(i);
      std::optional<std::filesystem::path> types;
      if (list[i].contains("types")) types = resolve(list[i].at("types"), where + ".types");
      src.graph = load_graph_files(resolve(require(list[i], "edges", where), where + ".edges"), types);
      out.snapshots.push_back(std::move(src));
    }
  }
  if (s.contains("generator")) out.snapshots.push_back(generated_graph(s.at("generator"), seed, "metrics.generator"));
  if (out.snapshots.empty()) throw ScenarioError("metrics needs snapshots or a generator");
  std::set<std::string> names;
  for (const auto& src : out.snapshots)
    if (!names.insert(src.name).second) throw ScenarioError("metrics: snapshot name '" + src.name + "' repeats");

  const auto& core = require(s, "core", "metrics");
  reject_unknown(core, {"k", "type", "file"}, "metrics.core");
  if (core.size() != 1) throw ScenarioError("metrics.core takes exactly one of k, type, file");
  if (core.contains("k")) out.core_k = as_count(core.at("k"), "metrics.core.k");
  if (core.contains("type")) {
    const auto t = as_string(core.at("type"), "metrics.core.type");
    if (t != "A" && t != "B") throw ScenarioError("metrics.core.type must be A or B");
    out.core_type = t == "A" ? PlayerType::TypeA : PlayerType::TypeB;
  }
  if (core.contains("file")) out.core_labels = load_labels(resolve(core.at("file"), "metrics.core.file"));
  if (s.contains("shell")) {
    const auto& shell = s.at("shell");
    reject_unknown(shell, {"file"}, "metrics.shell");
    out.shell_labels = load_labels(resolve(require(shell, "file", "metrics.shell"), "metrics.shell.file"));
  }
  return out;
}

inline bool valid_name(const std::string& name) {
  if (name.empty() || name == "." || name == "..") return false;
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

}  // namespace detail

/// Parses and validates a scenario document. `base` resolves relative input paths.
inline Scenario parse_scenario(Json doc, const std::vector<std::string>& overrides, const std::filesystem::path& base) {
  for (const auto& o : overrides) detail::apply_override(doc, o);
  Scenario sc;
  detail::reject_unknown(doc, {"name", "mode", "params", "seed", "enumerate", "dynamics", "monetary", "canonical",
                               "metrics", "assertions"},
                         "scenario");
  sc.name = detail::as_string(detail::require(doc, "name", "scenario"), "name");
  if (!detail::valid_name(sc.name)) throw ScenarioError("name may only use letters, digits, '_', '-' and '.'");
  sc.mode = detail::as_string(detail::require(doc, "mode", "scenario"), "mode");
  sc.seed = doc.contains("seed") ? detail::as_count(doc.at("seed"), "seed") : 0;

  if (doc.contains("params")) {
    const auto& p = doc.at("params");
    detail::reject_unknown(p, {"c_A", "c_B", "A"}, "params");
    try {
      sc.params = GameParams::make(detail::as_rational(detail::require(p, "c_A", "params"), "params.c_A"),
                                   detail::as_rational(detail::require(p, "c_B", "params"), "params.c_B"),
                                   detail::as_rational(detail::require(p, "A", "params"), "params.A"));
    } catch (const std::domain_error& e) {
      throw ScenarioError(std::string("params: ") + e.what());
    }
  } else if (sc.mode != "metrics") {
    throw ScenarioError("scenario: missing key 'params'");
  }

  auto section = [&](const char* key) -> const Json& { return detail::require(doc, key, "scenario"); };
  if (sc.mode == "enumerate")
    sc.settings = detail::parse_enumerate(section("enumerate"));
  else if (sc.mode == "dynamics")
    sc.settings = detail::parse_dynamics(section("dynamics"), false, sc.seed);
  else if (sc.mode == "monetary")
    sc.settings = detail::parse_dynamics(section("monetary"), true, sc.seed);
  else if (sc.mode == "canonical")
    sc.settings = detail::parse_canonical(section("canonical"));
  else if (sc.mode == "metrics")
    sc.settings = detail::parse_metrics(section("metrics"), base, sc.seed);
  else
    throw ScenarioError("mode must be enumerate, dynamics, monetary, canonical or metrics");
  for (const char* other : {"enumerate", "dynamics", "monetary", "canonical", "metrics"})
    if (other != sc.mode && doc.contains(other))
      throw ScenarioError("section '" + std::string(other) + "' does not belong to mode " + sc.mode);

  if (doc.contains("assertions")) {
    const auto& list = doc.at("assertions");
    if (!list.is_array()) throw ScenarioError("assertions must be a list of strings");
    for (const auto& a : list) sc.assertions.push_back(detail::parse_assertion(detail::as_string(a, "assertion")));
  }
  sc.hash = fnv1a_hex(doc.dump());
  sc.document = std::move(doc);
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  std::ifstream in(file);
  if (!in) throw ScenarioError("cannot open " + file.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(file.string() + ": " + e.what());
  }
  try {
    return parse_scenario(std::move(doc), overrides, file.parent_path());
  } catch (const ScenarioError& e) {
    throw ScenarioError(file.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Running

namespace detail {

inline OrderedJson provenance(const Scenario& sc) {
  return OrderedJson{{"scenario_hash", sc.hash}, {"seed", sc.seed}};
}

inline std::string provenance_comment(const Scenario& sc) {
  return "# scenario_hash=" + sc.hash + " seed=" + std::to_string(sc.seed) + "\n";
}

inline OrderedJson edges_json(const Topology& t) {
  OrderedJson edges = OrderedJson::array();
  for (const auto& l : t.links()) edges.push_back({l.lo, l.hi});
  return edges;
}

inline std::string edge_file(const Scenario& sc, const Topology& t) {
  std::ostringstream out;
  out << provenance_comment(sc);
  write_edge_list(out, t);
  return out.str();
}

inline std::string type_file(const Scenario& sc, const Topology& t) {
  std::ostringstream out;
  out << provenance_comment(sc);
  write_type_file(out, t);
  return out.str();
}

inline std::string set_literal(std::set<std::string> items) {
  std::string out = "{";
  for (const auto& s : items) out += (out.size() > 1 ? "," : "") + s;
  return out + "}";
}

inline std::string bounds_csv(const Scenario& sc, std::size_t n_a) {
  const auto b = distance_bounds(sc.params, n_a);
  std::ostringstream out;
  out << provenance_comment(sc) << "bound,expression,max_hops\n";
  out << "to_type_b,floor(sqrt(4*c_B))," << b.to_type_b << '\n';
  out << "type_a_pair,sqrt(" << to_string(b.type_a_pair.radicand) << ")+(" << to_string(b.type_a_pair.offset) << "),"
      << b.type_a_pair.floor() << '\n';
  out << "transfers_type_b,max(1;floor(sqrt(2*(c_A+c_B))))," << b.transfers_type_b << '\n';
  out << "transfers_b_to_core,nearest type-A node," << b.transfers_b_to_core << '\n';
  return out.str();
}

inline void run_enumerate(const Scenario& sc, const EnumerateSettings& s, RunOutcome& out) {
  const auto e = enumerate_stable(s.n_a, s.n_b, sc.params, s.transfers);
  auto& r = out.results;
  r.set("graphs_examined", e.graphs_examined);
  r.set("stable_count", e.stable.size());
  r.set("optimum", e.optimum);
  std::set<std::string> labels;
  std::size_t violations = 0;
  std::ostringstream jsonl;
  jsonl << provenance(sc).dump() << '\n';
  for (const auto& st : e.stable) {
    labels.insert(topology_label(st.topology));
    violations += check_distance_bounds(st.topology, sc.params, s.transfers).size();
    OrderedJson rec{{"edges", edges_json(st.topology)},
                    {"social_cost_num", st.social_cost.numerator()},
                    {"social_cost_den", st.social_cost.denominator()},
                    {"pairwise_stable", st.pairwise_stable},
                    {"stable_with_transfers", st.stable_with_transfers},
                    {"zero_tie", st.zero_tie}};
    jsonl << rec.dump() << '\n';
  }
  r.set("stable_set", set_literal(labels));
  if (e.min_stable) {
    r.set("min_stable_cost", *e.min_stable);
    r.set("max_stable_cost", *e.max_stable);
    r.set("price_of_stability", *e.min_stable / e.optimum);
    r.set("price_of_anarchy", *e.max_stable / e.optimum);
  }
  r.set("zero_tie_count", e.zero_tie_count);
  r.set("bound_violations", violations);
  out.artifacts["stable.jsonl"] = jsonl.str();
  out.artifacts["bounds.csv"] = bounds_csv(sc, s.n_a);
}

/// Stability flags, or "disconnected" where stability is undefined.
inline void set_stability(Results& r, const Topology& t, const GameParams& p) {
  if (!is_connected(t)) {
    r.set("pairwise_stable", "disconnected");
    r.set("stable_with_transfers", "disconnected");
    return;
  }
  r.set("pairwise_stable", is_pairwise_stable(t, p).stable);
  r.set("stable_with_transfers", is_stable_with_transfers(t, p).stable);
}

inline std::string link_class(const Topology& t, NodeId u, NodeId v) {
  std::string s{type_letter(t.type(u)), type_letter(t.type(v))};
  if (s == "BA") s = "AB";
  return s;
}

inline std::string trace_jsonl(const Scenario& sc, const GameResult& g) {
  std::ostringstream out;
  out << provenance(sc).dump() << '\n';
  std::size_t snap = 0;
  const auto& snaps = g.trace.snapshots;
  auto flush_snapshots = [&](std::size_t upto_turn) {
    for (; snap < snaps.size() && snaps[snap].turn <= upto_turn; ++snap) {
      const auto& s = snaps[snap].state;
      OrderedJson rec{{"turn", snaps[snap].turn},
                      {"snapshot", true},
                      {"hub", s.hub ? OrderedJson(*s.hub) : OrderedJson(nullptr)},
                      {"first_linker", s.first_linker ? OrderedJson(*s.first_linker) : OrderedJson(nullptr)},
                      {"hub_stubs", s.hub_stubs},
                      {"linker_stubs", s.linker_stubs},
                      {"dual_stubs", s.dual_stubs},
                      {"core_links_to_hub", s.core_links_to_hub},
                      {"type_a_present", s.type_a_present},
                      {"hub_linked_to_linker", s.hub_linked_to_linker},
                      {"term1", to_string(s.term1)},
                      {"term2", to_string(s.term2)},
                      {"region", region_name(s.region)},
                      {"on_nullcline", s.on_nullcline}};
      out << rec.dump() << '\n';
    }
  };
  for (const auto& e : g.trace.events) {
    if (e.turn > 0) flush_snapshots(e.turn - 1);
    OrderedJson rec{{"turn", e.turn},
                    {"act", e.act},
                    {"kind", event_name(e.kind)},
                    {"actor", e.actor},
                    {"pair", e.kind == EventKind::Arrival ? OrderedJson(nullptr) : OrderedJson{e.pair.lo, e.pair.hi}},
                    {"payment_num", e.payment.numerator()},
                    {"payment_den", e.payment.denominator()}};
    if (e.kind == EventKind::Arrival) rec["type"] = std::string(1, type_letter(e.arrival_type));
    out << rec.dump() << '\n';
  }
  flush_snapshots(static_cast<std::size_t>(-1));
  return out.str();
}

inline std::string transfers_csv(const Scenario& sc, const GameResult& g) {
  std::map<std::string, Rational> totals{{"AA", Rational(0)}, {"AB", Rational(0)}, {"BB", Rational(0)}};
  for (const auto& [key, amount] : g.trace.ledger.transfers())
    totals[link_class(g.final_topology, key.first, key.second)] += amount;
  std::ostringstream out;
  out << provenance_comment(sc) << "link_class,total_num,total_den\n";
  for (const auto& [cls, total] : totals)
    out << cls.substr(0, 1) << '-' << cls.substr(1) << ',' << total.numerator() << ',' << total.denominator() << '\n';
  return out.str();
}

/// Fisher-Yates with an explicit draw so schedules are reproducible across standard libraries' shuffle.
inline std::vector<PlayerType> shuffled(std::vector<PlayerType> v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
  return v;
}

inline std::string schedule_text(const std::vector<PlayerType>& s) {
  std::string out;
  for (auto t : s) out += type_letter(t);
  return out;
}

inline void run_dynamics(const Scenario& sc, const DynamicsSettings& s, RunOutcome& out) {
  const auto& p = sc.params;
  auto& r = out.results;
  const std::size_t n = s.config.arrival_schedule.size();
  const std::size_t n_a = static_cast<std::size_t>(
      std::count(s.config.arrival_schedule.begin(), s.config.arrival_schedule.end(), PlayerType::TypeA));
  const Rational optimum = canonical_optimum(n_a, n - n_a, p);
  r.set("players", n);
  r.set("optimum", optimum);

  if (s.trials == 1) {
    DynamicsConfig cfg = s.config;
    if (s.shuffle_arrivals) cfg.arrival_schedule = shuffled(cfg.arrival_schedule, trial_seed(sc.seed, 0));
    const auto g = run_game(cfg, p);
    const auto cost = social_cost(g.final_topology, p);
    const auto state = phase_state(g.final_topology, p, g.trace.first_linker, cfg.transfers);
    r.set("schedule", schedule_text(cfg.arrival_schedule));
    r.set("final", shape_name(recognize_shape(g.final_topology)));
    r.set("final_label", topology_label(g.final_topology));
    r.set("social_cost", cost.is_finite() ? to_string(cost.finite_part) : std::string("unreachable"));
    if (cost.is_finite()) r.set("cost_ratio", cost.finite_part / optimum);
    r.set("converged", g.trace.converged_at.has_value());
    if (g.trace.converged_at) {
      r.set("converged_at", *g.trace.converged_at);
      r.set("passes", *passes_to_converge(g.trace, n));
    }
    r.set("turns_played", g.trace.turns_played);
    r.set("links", g.final_topology.link_count());
    r.set("region", region_name(state.region));
    r.set("replay_matches", replay(g.trace) == g.final_topology);
    set_stability(r, g.final_topology, p);
    if (cfg.transfers) {
      r.set("settlement_free", core_links_settlement_free(g.final_topology, g.trace.ledger));
      Rational total(0);
      for (const auto& [key, amount] : g.trace.ledger.transfers()) total += amount;
      r.set("total_transfers", total);
      out.artifacts["transfers.csv"] = transfers_csv(sc, g);
    }
    out.artifacts["trace.jsonl"] = trace_jsonl(sc, g);
    out.artifacts["final_edges.txt"] = edge_file(sc, g.final_topology);
    out.artifacts["final_types.txt"] = type_file(sc, g.final_topology);
    return;
  }

  ConvergenceReport report;
  report.players = n;
  report.trials = s.trials;
  std::map<std::string, std::size_t> shapes;
  std::size_t max_passes = 0, converged = 0, horizon = 0;
  bool settlement_free = true;
  std::optional<Rational> worst_ratio;
  std::ostringstream csv;
  csv << provenance_comment(sc) << "trial,schedule,final,social_cost_num,social_cost_den,converged_at\n";
  for (std::size_t i = 0; i < s.trials; ++i) {
    DynamicsConfig cfg = s.config;
    if (s.random_order) cfg.turn_order = UniformRandom{trial_seed(sc.seed, i)};
    cfg.seed = trial_seed(sc.seed, i);
    if (s.shuffle_arrivals) cfg.arrival_schedule = shuffled(cfg.arrival_schedule, trial_seed(sc.seed ^ 0xA5A5A5A5ULL, i));
    const auto g = run_game(cfg, p);
    const auto shape = shape_name(recognize_shape(g.final_topology));
    ++shapes[shape];
    const auto cost = social_cost(g.final_topology, p);
    if (cost.is_finite()) {
      const Rational ratio = cost.finite_part / optimum;
      if (!worst_ratio || ratio > *worst_ratio) worst_ratio = ratio;
    }
    report.convergence_turns.push_back(g.trace.converged_at);
    if (g.trace.converged_at) {
      ++converged;
      horizon = std::max(horizon, *g.trace.converged_at);
      max_passes = std::max(max_passes, *passes_to_converge(g.trace, n));
    } else {
      ++report.not_converged;
    }
    if (cfg.transfers) settlement_free = settlement_free && core_links_settlement_free(g.final_topology, g.trace.ledger);
    csv << i << ',' << schedule_text(cfg.arrival_schedule) << ',' << shape << ',' << cost.finite_part.numerator() << ','
        << cost.finite_part.denominator() << ','
        << (g.trace.converged_at ? std::to_string(*g.trace.converged_at) : std::string()) << '\n';
  }
  r.set("trials", s.trials);
  r.set("converged_count", converged);
  r.set("final", shapes.size() == 1 ? shapes.begin()->first : std::string("mixed"));
  for (const auto& [shape, count] : shapes) r.set("final_count." + shape, count);
  r.set("max_passes", max_passes);
  if (worst_ratio) r.set("max_cost_ratio", *worst_ratio);
  if (s.config.transfers) r.set("settlement_free", settlement_free);
  if (s.fit_tail) {
    fit_survival_tail(report, horizon);
    r.set("tail_fit_points", report.fit_points);
    r.set("tail_slope", report.slope);
    r.set("tail_r_squared", report.r_squared);
  }
  out.artifacts["trials.csv"] = csv.str();
}

inline void run_canonical(const Scenario& sc, const CanonicalSettings& s, RunOutcome& out) {
  const auto& p = sc.params;
  auto& r = out.results;
  const auto t = build(s.kind, s.n_a, s.n_b);
  const auto direct = social_cost(t, p);
  r.set("kind", kind_name(s.kind));
  r.set("shape", shape_name(recognize_shape(t)));
  r.set("social_cost", direct.is_finite() ? to_string(direct.finite_part) : std::string("unreachable"));
  std::optional<Rational> cost;
  if (has_closed_form(s.kind)) {
    cost = closed_form_cost(s.kind, s.n_a, s.n_b, p);
    r.set("closed_form_cost", *cost);
    r.set("closed_form_matches", direct.is_finite() && direct.finite_part == *cost);
  } else if (direct.is_finite()) {
    cost = direct.finite_part;
  }
  set_stability(r, t, p);
  r.set("bound_violations", check_distance_bounds(t, p, s.transfers).size());
  const auto prices = stability_prices(s.n_a, s.n_b, p, s.transfers, PriceMode::ClosedForm);
  r.set("optimum", prices.optimum);
  if (cost) r.set("cost_ratio", *cost / prices.optimum);
  if (prices.price_of_stability) r.set("price_of_stability", *prices.price_of_stability);
  if (prices.price_of_anarchy_lower) r.set("price_of_anarchy_lower", *prices.price_of_anarchy_lower);
  if (prices.price_of_anarchy_upper) r.set("price_of_anarchy_upper", *prices.price_of_anarchy_upper);
  if (const auto* lines = std::get_if<LinesOnClique>(&s.kind))
    r.set("printed_lines_cost", printed_lines_cost(s.n_a, s.n_b, static_cast<std::int64_t>(lines->length), p));
  if (std::holds_alternative<CliqueAbsorbedStar>(s.kind))
    r.set("printed_absorbed_star_cost", printed_absorbed_star_cost(s.n_a, s.n_b, p));

  std::ostringstream csv;
  csv << provenance_comment(sc) << "quantity,value\n";
  csv << "optimum," << to_string(prices.optimum) << '\n';
  if (prices.price_of_stability) csv << "price_of_stability," << to_string(*prices.price_of_stability) << '\n';
  if (prices.price_of_anarchy_lower) csv << "price_of_anarchy_lower," << to_string(*prices.price_of_anarchy_lower) << '\n';
  if (prices.price_of_anarchy_upper) csv << "price_of_anarchy_upper," << to_string(*prices.price_of_anarchy_upper) << '\n';
  out.artifacts["prices.csv"] = csv.str();
  out.artifacts["bounds.csv"] = bounds_csv(sc, s.n_a);
  out.artifacts["edges.txt"] = edge_file(sc, t);
  out.artifacts["types.txt"] = type_file(sc, t);
}

inline std::vector<NodeId> ids_for(const LoadedGraph& g, const std::vector<std::uint64_t>& labels, const std::string& what) {
  std::vector<NodeId> out;
  for (auto label : labels) {
    const auto id = g.id_of(label);
    if (!id) throw ScenarioError(what + " names node " + std::to_string(label) + " absent from the graph");
    out.push_back(*id);
  }
  return out;
}

inline void run_metrics(const Scenario& sc, const MetricsSettings& s, RunOutcome& out) {
  auto& r = out.results;
  std::vector<MetricRow> rows;
  for (const auto& src : s.snapshots) {
    const auto& t = src.graph.topology;
    const auto cores = core_decomposition(t);
    std::vector<NodeId> core;
    if (s.core_k) core = k_core(t, *s.core_k);
    if (s.core_type) core = t.players_of(*s.core_type);
    if (s.core_labels) core = ids_for(src.graph, *s.core_labels, "core file");
    std::vector<NodeId> shell;
    if (s.shell_labels) {
      shell = ids_for(src.graph, *s.shell_labels, "shell file");
    } else {
      std::vector<bool> in_core(t.size(), false);
      for (auto v : core) in_core[v] = true;
      for (NodeId v = 0; v < t.size(); ++v)
        if (!in_core[v]) shell.push_back(v);
    }
    std::size_t max_core = 0;
    for (auto c : cores.coreness) max_core = std::max(max_core, c);
    auto emit = [&](const std::string& metric, const Rational& value) {
      rows.push_back({src.name, metric, value});
      r.set(src.name + "." + metric, value);
    };
    emit("nodes", Rational(static_cast<std::int64_t>(t.size())));
    emit("links", Rational(static_cast<std::int64_t>(t.link_count())));
    emit("max_degree", Rational(static_cast<std::int64_t>(max_degree(t))));
    emit("max_coreness", Rational(static_cast<std::int64_t>(max_core)));
    emit("core_size", Rational(static_cast<std::int64_t>(core.size())));
    if (core.size() >= 2) emit("core_density", subgraph_density(t, core));
    if (!core.empty()) {
      const auto d = mean_node_core_distance(t, core, shell);
      if (d.mean) emit("mean_core_distance", *d.mean);
      emit("shell_reached", Rational(static_cast<std::int64_t>(d.reached)));
      emit("shell_unreachable", Rational(static_cast<std::int64_t>(d.unreachable)));
    }
    if (src.graph.duplicate_links) r.set(src.name + ".duplicate_links", src.graph.duplicate_links);
  }
  std::ostringstream csv;
  csv << provenance_comment(sc);
  write_metrics_csv(csv, rows);
  out.artifacts["metrics.csv"] = csv.str();
}

inline bool compare(const std::string& actual, const std::string& op, const std::string& expected, std::string& note) {
  std::optional<Rational> a, e;
  try {
    a = parse_rational(actual);
    e = parse_rational(expected);
  } catch (const std::exception&) {
    a.reset();
  }
  if (a && e) {
    if (op == "==") return *a == *e;
    if (op == "!=") return *a != *e;
    if (op == "<") return *a < *e;
    if (op == "<=") return *a <= *e;
    if (op == ">") return *a > *e;
    return *a >= *e;
  }
  if (op == "==") return actual == expected;
  if (op == "!=") return actual != expected;
  note = "ordering needs numbers";
  return false;
}

}  // namespace detail

/// Runs a validated scenario; artifacts stay in memory until write_artifacts.
inline RunOutcome run(const Scenario& sc) {
  RunOutcome out;
  out.results.set("scenario_hash", sc.hash);
  out.results.set("seed", std::to_string(sc.seed));
  try {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, EnumerateSettings>) detail::run_enumerate(sc, s, out);
          if constexpr (std::is_same_v<T, DynamicsSettings>) detail::run_dynamics(sc, s, out);
          if constexpr (std::is_same_v<T, CanonicalSettings>) detail::run_canonical(sc, s, out);
          if constexpr (std::is_same_v<T, MetricsSettings>) detail::run_metrics(sc, s, out);
        },
        sc.settings);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(sc.name + ": " + e.what());
  }
  for (const auto& a : sc.assertions) {
    AssertionOutcome o{a.text, false, "<missing>"};
    if (const auto* actual = out.results.find(a.key)) {
      o.actual = *actual;
      std::string note;
      o.passed = detail::compare(*actual, a.op, a.expected, note);
      if (!note.empty()) o.actual += " (" + note + ")";
    }
    out.assertions.push_back(std::move(o));
  }

  OrderedJson summary;
  summary["name"] = sc.name;
  summary["mode"] = sc.mode;
  summary["scenario_hash"] = sc.hash;
  summary["seed"] = sc.seed;
  summary["params"] = {{"c_A", to_string(sc.params.link_cost_a())},
                       {"c_B", to_string(sc.params.link_cost_b())},
                       {"A", to_string(sc.params.importance())}};
  OrderedJson results = OrderedJson::object();
  for (const auto& [k, v] : out.results.items()) results[k] = v;
  summary["results"] = std::move(results);
  OrderedJson checks = OrderedJson::array();
  for (const auto& a : out.assertions)
    checks.push_back({{"assertion", a.text}, {"passed", a.passed}, {"actual", a.actual}});
  summary["assertions"] = std::move(checks);
  summary["passed"] = out.passed();
  out.artifacts["summary.json"] = summary.dump(2) + "\n";
  return out;
}

inline void write_artifacts(const RunOutcome& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : out.artifacts) {
    std::ofstream f(dir / name, std::ios::binary);
    f << contents;
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  }
}

}  // namespace nfg::scenario

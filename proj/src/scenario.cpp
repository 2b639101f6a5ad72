#include "magnon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace magnon {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::rabi: return "rabi";
    case ExperimentKind::tbs_single: return "tbs-single";
    case ExperimentKind::hom: return "hom";
    case ExperimentKind::phase_scan: return "phase-scan";
    case ExperimentKind::evolve: return "evolve";
  }
  return "?";
}

std::string to_string(Frame frame) { return frame == Frame::lab ? "lab" : "rotating"; }

std::string to_string(OutputKind kind) {
  switch (kind) {
    case OutputKind::csv: return "csv";
    case OutputKind::json: return "json";
    case OutputKind::svg: return "svg";
  }
  return "?";
}

bool ScenarioConfig::wants(OutputKind k) const {
  return std::find(outputs.begin(), outputs.end(), k) != outputs.end();
}

std::string ScenarioConfig::output_stem() const {
  if (!name.empty()) return name;
  return to_string(kind);
}

bool ScenarioConfig::balanced_request() const {
  return (kind == ExperimentKind::tbs_single || kind == ExperimentKind::hom) && !tau_s &&
         schedule.empty();
}

namespace {

/// Strict reader over one JSON object: every key must be consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "/" : path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) fail(at(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(at(key), "expected a finite number");
    return x;
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) fail(at(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  const json* array(const std::string& key) {
    const json* v = find(key);
    if (v && !v->is_array()) fail(at(key), "expected an array");
    return v;
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ExperimentKind parse_kind(const std::string& s, const std::string& where) {
  for (auto k : {ExperimentKind::rabi, ExperimentKind::tbs_single, ExperimentKind::hom,
                 ExperimentKind::phase_scan, ExperimentKind::evolve}) {
    if (to_string(k) == s) return k;
  }
  ObjectReader::fail(where, "unknown experiment kind '" + s +
                                "' (expected rabi, tbs-single, hom, phase-scan or evolve)");
}

int narrow_int(std::int64_t v, const std::string& where) {
  if (v < -1000000000 || v > 1000000000) ObjectReader::fail(where, "integer out of range");
  return static_cast<int>(v);
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) ObjectReader::fail("/", "expected an object");
  {
    std::vector<std::string> missing;
    for (const char* key : {"kind", "g_hz"})
      if (!j.contains(key)) missing.emplace_back(key);
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      ObjectReader::fail("/", "missing required field(s): " + list);
    }
  }

  ObjectReader r(j, "");
  ScenarioConfig c;
  c.kind = parse_kind(*r.string("kind"), r.at("kind"));
  c.name = r.string("name").value_or("");
  c.description = r.string("description").value_or("");
  if (auto v = r.integer("n_max")) c.n_max = narrow_int(*v, r.at("n_max"));
  c.g_hz = *r.number("g_hz");
  if (auto v = r.number("g_phase_rad")) c.g_phase_rad = *v;
  if (auto v = r.number("delta_omega_hz")) c.delta_omega_hz = *v;
  if (auto v = r.number("omega_bar_hz")) c.omega_bar_hz = *v;
  if (auto v = r.string("frame")) {
    if (*v == "lab") c.frame = Frame::lab;
    else if (*v == "rotating") c.frame = Frame::rotating;
    else ObjectReader::fail(r.at("frame"), "expected 'lab' or 'rotating'");
  }
  c.tau_s = r.number("tau_s");
  c.hold_detuning_hz = r.number("hold_detuning_hz");
  if (auto v = r.number("pre_hold_s")) c.pre_hold_s = *v;
  if (auto v = r.number("post_hold_s")) c.post_hold_s = *v;
  c.duration_s = r.number("duration_s");
  if (auto v = r.integer("samples_per_segment"))
    c.samples_per_segment = narrow_int(*v, r.at("samples_per_segment"));
  if (const json* v = r.find("seed")) {
    if (!v->is_number_unsigned()) ObjectReader::fail(r.at("seed"), "expected a non-negative integer");
    c.seed = v->get<std::uint64_t>();
  }

  if (const json* v = r.find("scan")) {
    ObjectReader s(*v, "/scan");
    ScanSpec spec;
    const auto lo = s.number("min_hz");
    const auto hi = s.number("max_hz");
    if (!lo || !hi) ObjectReader::fail("/scan", "missing required field(s): min_hz, max_hz");
    spec.min_hz = *lo;
    spec.max_hz = *hi;
    if (auto p = s.integer("points")) spec.points = narrow_int(*p, "/scan/points");
    s.reject_unknown();
    c.scan = spec;
  }

  if (const json* arr = r.array("schedule")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string path = "/schedule/" + std::to_string(i);
      ObjectReader s((*arr)[i], path);
      SegmentSpec seg;
      const auto d = s.number("duration_s");
      if (!d) ObjectReader::fail(path, "missing required field(s): duration_s");
      seg.duration_s = *d;
      seg.delta_omega_hz = s.number("delta_omega_hz").value_or(0.0);
      seg.omega_bar_hz = s.number("omega_bar_hz");
      s.reject_unknown();
      c.schedule.push_back(seg);
    }
  }

  if (const json* arr = r.array("initial_state")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string path = "/initial_state/" + std::to_string(i);
      ObjectReader s((*arr)[i], path);
      AmplitudeTerm t;
      const auto m1 = s.integer("m1");
      const auto m2 = s.integer("m2");
      if (!m1 || !m2) ObjectReader::fail(path, "missing required field(s): m1, m2");
      t.m1 = narrow_int(*m1, path + "/m1");
      t.m2 = narrow_int(*m2, path + "/m2");
      t.re = s.number("re").value_or(1.0);
      t.im = s.number("im").value_or(0.0);
      s.reject_unknown();
      c.initial_state.push_back(t);
    }
  }

  if (const json* arr = r.array("outputs")) {
    c.outputs.clear();
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string path = "/outputs/" + std::to_string(i);
      const json& v = (*arr)[i];
      if (!v.is_string()) ObjectReader::fail(path, "expected a string");
      const auto s = v.get<std::string>();
      if (s == "csv") c.outputs.push_back(OutputKind::csv);
      else if (s == "json") c.outputs.push_back(OutputKind::json);
      else if (s == "svg") c.outputs.push_back(OutputKind::svg);
      else ObjectReader::fail(path, "unknown output '" + s + "' (expected csv, json or svg)");
    }
  }

  r.reject_unknown();
  return c;
}

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["kind"] = to_string(c.kind);
  if (!c.name.empty()) j["name"] = c.name;
  if (!c.description.empty()) j["description"] = c.description;
  j["n_max"] = c.n_max;
  j["g_hz"] = c.g_hz;
  j["g_phase_rad"] = c.g_phase_rad;
  j["delta_omega_hz"] = c.delta_omega_hz;
  j["omega_bar_hz"] = c.omega_bar_hz;
  j["frame"] = to_string(c.frame);
  if (c.tau_s) j["tau_s"] = *c.tau_s;
  if (c.hold_detuning_hz) j["hold_detuning_hz"] = *c.hold_detuning_hz;
  j["pre_hold_s"] = c.pre_hold_s;
  j["post_hold_s"] = c.post_hold_s;
  if (c.duration_s) j["duration_s"] = *c.duration_s;
  if (c.scan) j["scan"] = {{"min_hz", c.scan->min_hz}, {"max_hz", c.scan->max_hz}, {"points", c.scan->points}};
  if (!c.schedule.empty()) {
    json arr = json::array();
    for (const auto& s : c.schedule) {
      json e{{"delta_omega_hz", s.delta_omega_hz}, {"duration_s", s.duration_s}};
      if (s.omega_bar_hz) e["omega_bar_hz"] = *s.omega_bar_hz;
      arr.push_back(std::move(e));
    }
    j["schedule"] = std::move(arr);
  }
  if (!c.initial_state.empty()) {
    json arr = json::array();
    for (const auto& t : c.initial_state) arr.push_back({{"m1", t.m1}, {"m2", t.m2}, {"re", t.re}, {"im", t.im}});
    j["initial_state"] = std::move(arr);
  }
  json outs = json::array();
  for (auto o : c.outputs) outs.push_back(to_string(o));
  j["outputs"] = std::move(outs);
  j["samples_per_segment"] = c.samples_per_segment;
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

std::string serialize_scenario(const ScenarioConfig& c) { return scenario_to_json(c).dump(2) + "\n"; }

ScenarioConfig parse_scenario_unchecked(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("/: invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig c = parse_scenario_unchecked(text);
  validate_scenario(c);
  return c;
}

void validate_scenario(const ScenarioConfig& c) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (c.n_max < 0) fail("n_max must be >= 0");
  if (c.n_max > 64) fail("n_max must be <= 64");
  if (c.samples_per_segment < 1) fail("samples_per_segment must be >= 1");
  if (c.pre_hold_s < 0 || c.post_hold_s < 0) fail("hold durations must be >= 0");
  if (c.tau_s && !(*c.tau_s > 0)) fail("tau_s must be > 0");
  if (c.duration_s && !(*c.duration_s > 0)) fail("duration_s must be > 0");
  if (c.g_hz < 0) fail("g_hz must be >= 0 (use g_phase_rad for a complex coupling)");
  if (c.hold_detuning_hz && !std::isfinite(*c.hold_detuning_hz)) fail("hold_detuning_hz must be finite");

  const bool pulsed = c.kind != ExperimentKind::evolve;
  if (pulsed && c.g_hz == 0.0) fail(to_string(c.kind) + " experiment requires g_hz != 0");

  for (std::size_t i = 0; i < c.schedule.size(); ++i) {
    if (!(c.schedule[i].duration_s > 0))
      fail("schedule segment " + std::to_string(i) + ": duration_s must be > 0");
  }
  if (c.kind == ExperimentKind::evolve) {
    if (c.schedule.empty()) fail("evolve experiment requires a non-empty schedule");
    if (c.initial_state.empty()) fail("evolve experiment requires an initial_state");
  }
  if ((c.kind == ExperimentKind::rabi || c.kind == ExperimentKind::phase_scan) && !c.schedule.empty())
    fail(to_string(c.kind) + " experiment does not accept a schedule");

  int needed = 0;
  switch (c.kind) {
    case ExperimentKind::rabi:
    case ExperimentKind::tbs_single: needed = 1; break;
    case ExperimentKind::hom:
    case ExperimentKind::phase_scan: needed = 2; break;
    case ExperimentKind::evolve: needed = 0; break;
  }
  double norm2 = 0;
  for (const auto& t : c.initial_state) {
    if (t.m1 < 0 || t.m2 < 0) fail("initial_state occupations must be >= 0");
    needed = std::max(needed, t.m1 + t.m2);
    norm2 += t.re * t.re + t.im * t.im;
  }
  if (!c.initial_state.empty() && !(norm2 > 0)) fail("initial_state has zero norm");
  if (c.n_max < needed) {
    fail("n_max = " + std::to_string(c.n_max) + " is below the " + std::to_string(needed) +
         " quanta this experiment needs");
  }

  if (c.balanced_request() && std::abs(c.delta_omega_hz) > 2.0 * c.g_hz * (1 + 1e-12)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "balanced beamsplitter unreachable: |delta_omega_hz| = " << std::abs(c.delta_omega_hz)
        << " exceeds 2*g_hz = " << 2.0 * c.g_hz << " (50% transfer needs |delta_omega| <= 2|g|)";
    fail(msg.str());
  }
  if (c.scan && c.scan->points < 1) fail("scan.points must be >= 1");
  if (c.scan && c.scan->max_hz < c.scan->min_hz) fail("scan.max_hz must be >= scan.min_hz");
}

}  // namespace magnon

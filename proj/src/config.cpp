#include "spikesim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spikesim/errors.hpp"

namespace spikesim {

namespace {

struct Entry {
  std::string value;
  int line = 0;  // 0 for command-line overrides
  bool used = false;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(int line, std::string_view key, const std::string& msg) {
  std::string where = line > 0 ? "line " + std::to_string(line) : std::string("override");
  if (!key.empty()) where += ", key '" + std::string(key) + "'";
  throw Error(ErrorKind::config, where + ": " + msg);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"name", "seed", "repeat"}},
      {"model", {"kind", "p2", "p1", "p0", "alpha", "a", "b", "c", "d"}},
      {"current", {"kind", "value", "initial", "breakpoints", "base", "steps"}},
      {"init", {"t", "v", "w"}},
      {"solver",
       {"scheme", "theta", "M", "dt", "dv", "epsilon", "DT", "DV", "oracle_tol", "t_end", "spike_interp",
        "min_step", "max_floored_steps", "max_events", "record_every"}},
      {"outputs", {"trajectory", "spikes", "report"}},
  };
  return keys;
}

class Document {
 public:
  void set(const std::string& section, const std::string& key, std::string value, int line,
           bool allow_replace) {
    const auto sec = known_keys().find(section);
    if (sec == known_keys().end()) fail_at(line, key, "unknown section [" + section + "]");
    if (!sec->second.count(key)) {
      fail_at(line, qualified(section, key), "unknown key");
    }
    auto [it, inserted] = entries_.try_emplace(qualified(section, key), Entry{value, line, false});
    if (!inserted) {
      if (!allow_replace) {
        fail_at(line, qualified(section, key),
                "duplicate key (first set on line " + std::to_string(it->second.line) + ")");
      }
      it->second = Entry{std::move(value), line, false};
    }
  }

  const Entry* find(const std::string& section, const std::string& key) {
    auto it = entries_.find(qualified(section, key));
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  bool has(const std::string& section, const std::string& key) const {
    return entries_.count(qualified(section, key)) > 0;
  }

  std::string str(const std::string& section, const std::string& key, std::string fallback) {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
  }

  double num(const std::string& section, const std::string& key, double fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    return parse_double(e->value, e->line, qualified(section, key));
  }

  std::int64_t integer(const std::string& section, const std::string& key, std::int64_t fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::int64_t out = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
      fail_at(e->line, qualified(section, key), "expected an integer, got '" + e->value + "'");
    }
    return out;
  }

  std::vector<InputCurrent::Breakpoint> breakpoints(const std::string& section, const std::string& key) {
    std::vector<InputCurrent::Breakpoint> out;
    const Entry* e = find(section, key);
    if (!e) return out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string_view s = trim(item);
      if (s.empty()) continue;
      const auto colon = s.find(':');
      if (colon == std::string_view::npos) {
        fail_at(e->line, qualified(section, key), "expected time:value pairs, got '" + std::string(s) + "'");
      }
      out.push_back({parse_double(trim(s.substr(0, colon)), e->line, qualified(section, key)),
                     parse_double(trim(s.substr(colon + 1)), e->line, qualified(section, key))});
    }
    return out;
  }

  int line_of(const std::string& section, const std::string& key) const {
    auto it = entries_.find(qualified(section, key));
    return it == entries_.end() ? -1 : it->second.line;
  }

  void reject_unused(const std::string& why) const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.used) fail_at(entry.line, key, why);
    }
  }

 private:
  static std::string qualified(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

  static double parse_double(std::string_view text, int line, const std::string& key) {
    double out = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || first == last) {
      fail_at(line, key, "expected a number, got '" + std::string(text) + "'");
    }
    return out;
  }

  std::map<std::string, Entry> entries_;
};

void apply_override(Document& doc, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) fail_at(0, text, "expected section.key=value");
  const std::string lhs(trim(std::string_view(text).substr(0, eq)));
  const std::string value(trim(std::string_view(text).substr(eq + 1)));
  const auto dot = lhs.find('.');
  const std::string section = dot == std::string::npos ? "" : lhs.substr(0, dot);
  const std::string key = dot == std::string::npos ? lhs : lhs.substr(dot + 1);
  doc.set(section, key, value, 0, true);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  Document doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    std::string_view line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_at(line_no, "", "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().count(section) || section.empty()) {
        fail_at(line_no, "", "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(line_no, "", "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail_at(line_no, "", "empty key");
    doc.set(section, key, value, line_no, false);
  }
  for (const auto& o : overrides) apply_override(doc, o);

  ExperimentConfig cfg;
  cfg.name = doc.str("", "name", cfg.name);
  cfg.seed = static_cast<std::uint64_t>(doc.integer("", "seed", 0));
  cfg.repeat = static_cast<int>(doc.integer("", "repeat", 5));

  // model
  const std::string kind_name = doc.str("model", "kind", "canonical-quadratic");
  const auto kind = parse_model_kind(kind_name);
  if (!kind) fail_at(doc.line_of("model", "kind"), "model.kind", "unknown model kind '" + kind_name + "'");
  ModelSpec& m = cfg.model;
  m.kind = *kind;
  m.a = doc.num("model", "a", 0.0);
  m.b = doc.num("model", "b", 0.0);
  m.c = doc.num("model", "c", 0.0);
  m.d = doc.num("model", "d", 1.0);
  if (m.kind == ModelKind::quadratic_izhikevich) {
    m.p2 = doc.num("model", "p2", 1.0);
    m.p1 = doc.num("model", "p1", 0.0);
    m.p0 = doc.num("model", "p0", 0.0);
  }
  if (m.kind == ModelKind::quartic) m.alpha = doc.num("model", "alpha", 0.0);

  // current
  const std::string ckind = doc.str("current", "kind", "constant");
  if (ckind == "constant") {
    cfg.current = InputCurrent::constant(doc.num("current", "value", 0.0));
  } else if (ckind == "piecewise-constant") {
    const double initial = doc.num("current", "initial", 0.0);
    cfg.current = InputCurrent::piecewise_constant(initial, doc.breakpoints("current", "breakpoints"));
  } else if (ckind == "sum-of-steps") {
    const double base = doc.num("current", "base", 0.0);
    cfg.current = InputCurrent::sum_of_steps(base, doc.breakpoints("current", "steps"));
  } else {
    fail_at(doc.line_of("current", "kind"), "current.kind", "unknown current kind '" + ckind + "'");
  }

  // init
  cfg.init.t = doc.num("init", "t", 0.0);
  cfg.init.v = doc.num("init", "v", 0.0);
  cfg.init.w = doc.num("init", "w", 0.0);

  // solver
  SolverConfig& s = cfg.solver;
  const std::string scheme = doc.str("solver", "scheme", std::string(to_string(s.scheme)));
  const auto parsed_scheme = parse_scheme(scheme);
  if (!parsed_scheme) fail_at(doc.line_of("solver", "scheme"), "solver.scheme", "unknown scheme '" + scheme + "'");
  s.scheme = *parsed_scheme;
  s.theta = doc.num("solver", "theta", s.theta);
  s.M = doc.num("solver", "M", s.M);
  s.dt = doc.num("solver", "dt", s.dt);
  s.dv = doc.num("solver", "dv", s.dv);
  s.epsilon = doc.num("solver", "epsilon", s.epsilon);
  s.max_dt = doc.num("solver", "DT", s.max_dt);
  s.max_dv = doc.num("solver", "DV", s.max_dv);
  s.oracle_tol = doc.num("solver", "oracle_tol", s.oracle_tol);
  s.t_end = doc.num("solver", "t_end", s.t_end);
  const std::string interp = doc.str("solver", "spike_interp", std::string(to_string(s.spike_interp)));
  const auto parsed_interp = parse_spike_interp(interp);
  if (!parsed_interp) {
    fail_at(doc.line_of("solver", "spike_interp"), "solver.spike_interp", "unknown value '" + interp + "'");
  }
  s.spike_interp = *parsed_interp;
  s.min_step = doc.num("solver", "min_step", s.min_step);
  s.max_floored_steps = doc.integer("solver", "max_floored_steps", s.max_floored_steps);
  const auto max_events = doc.integer("solver", "max_events", static_cast<std::int64_t>(s.max_events));
  const auto record_every = doc.integer("solver", "record_every", static_cast<std::int64_t>(s.record_every));
  if (max_events < 1) fail_at(doc.line_of("solver", "max_events"), "solver.max_events", "must be >= 1");
  if (record_every < 0) fail_at(doc.line_of("solver", "record_every"), "solver.record_every", "must be >= 0");
  s.max_events = static_cast<std::size_t>(max_events);
  s.record_every = static_cast<std::size_t>(record_every);

  // outputs
  cfg.outputs.trajectory = doc.str("outputs", "trajectory", cfg.outputs.trajectory);
  cfg.outputs.spikes = doc.str("outputs", "spikes", cfg.outputs.spikes);
  cfg.outputs.report = doc.str("outputs", "report", cfg.outputs.report);

  doc.reject_unused("key does not apply to the selected kind");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), overrides);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, msg); };
  validate(cfg.model);
  validate(cfg.solver, cfg.model.a);
  if (!is_finite(cfg.init)) fail("init must be finite");
  if (!(cfg.model.c < cfg.solver.theta)) fail("model.c must lie below solver.theta");
  if (cfg.model.kind == ModelKind::exponential && cfg.solver.theta > kExpOverflowGuard) {
    fail("solver.theta exceeds the exponential overflow guard");
  }
  if (cfg.repeat < 1) fail("repeat must be >= 1");
  const auto& o = cfg.outputs;
  if ((!o.trajectory.empty() && (o.trajectory == o.spikes || o.trajectory == o.report)) ||
      (!o.spikes.empty() && o.spikes == o.report)) {
    fail("output paths must be distinct");
  }
}

}  // namespace spikesim

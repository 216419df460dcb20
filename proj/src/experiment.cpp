#include "spikesim/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "spikesim/error_analysis.hpp"

namespace spikesim {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json config_json(const ExperimentConfig& c) {
  json model = {{"kind", to_string(c.model.kind)}, {"a", c.model.a}, {"b", c.model.b},
                {"c", c.model.c},                  {"d", c.model.d}};
  if (c.model.kind == ModelKind::quadratic_izhikevich) {
    model["p2"] = c.model.p2;
    model["p1"] = c.model.p1;
    model["p0"] = c.model.p0;
  }
  if (c.model.kind == ModelKind::quartic) model["alpha"] = c.model.alpha;

  json bps = json::array();
  for (const auto& bp : c.current.breakpoints()) bps.push_back({bp.time, bp.value});
  json current = {{"kind", to_string(c.current.kind())}, {"base", c.current.base()}, {"breakpoints", bps}};

  const SolverConfig& s = c.solver;
  json solver = {{"scheme", to_string(s.scheme)},
                 {"theta", s.theta},
                 {"M", s.M},
                 {"dt", s.dt},
                 {"dv", s.dv},
                 {"epsilon", s.epsilon},
                 {"DT", s.max_dt},
                 {"DV", s.max_dv},
                 {"oracle_tol", s.oracle_tol},
                 {"t_end", s.t_end},
                 {"spike_interp", to_string(s.spike_interp)},
                 {"min_step", s.min_step},
                 {"max_floored_steps", s.max_floored_steps},
                 {"max_events", s.max_events},
                 {"record_every", s.record_every}};

  return {{"name", c.name},
          {"model", model},
          {"current", current},
          {"init", {{"t", c.init.t}, {"v", c.init.v}, {"w", c.init.w}}},
          {"solver", solver},
          {"outputs",
           {{"trajectory", c.outputs.trajectory}, {"spikes", c.outputs.spikes}, {"report", c.outputs.report}}},
          {"seed", c.seed},
          {"repeat", c.repeat}};
}

json pattern_fields(const std::optional<PatternClass>& p, double tol, std::size_t skip) {
  if (!p) return nullptr;
  return {{"label", p->name()},
          {"period", p->period ? json(*p->period) : json(nullptr)},
          {"residual", p->residual},
          {"tolerance", tol},
          {"transient_skip", skip},
          {"tolerance_rule", "10% of the reset-sequence range"}};
}

bool same_setup(const ExperimentConfig& x, const ExperimentConfig& y) {
  const ModelSpec& a = x.model;
  const ModelSpec& b = y.model;
  const bool model = a.kind == b.kind && a.p2 == b.p2 && a.p1 == b.p1 && a.p0 == b.p0 && a.alpha == b.alpha &&
                     a.a == b.a && a.b == b.b && a.c == b.c && a.d == b.d;
  const auto& bx = x.current.breakpoints();
  const auto& by = y.current.breakpoints();
  const bool current = x.current.kind() == y.current.kind() && x.current.base() == y.current.base() &&
                       std::equal(bx.begin(), bx.end(), by.begin(), by.end(), [](const auto& p, const auto& q) {
                         return p.time == q.time && p.value == q.value;
                       });
  return model && current && x.init == y.init;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

RunOutput execute(const ExperimentConfig& config, int repeat) {
  validate(config);
  RunOutput out;
  std::vector<double> times;
  for (int i = 0; i < std::max(1, repeat); ++i) {
    const auto start = std::chrono::steady_clock::now();
    out.result = simulate(config.model, config.current, config.init, config.solver);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  BenchReport& r = out.report;
  r.scheme = config.solver.scheme;
  r.wall_time_median = n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
  const SpikeTrain& train = out.result.train;
  r.step_count = train.step_count;
  r.spike_count = train.events.size();
  r.terminated_by = train.terminated_by;
  if (!train.events.empty()) {
    r.first_spike_time = train.events.front().spike_time;
    r.first_spike_w = train.events.front().w_at_spike;
    const std::size_t skip = default_transient_skip(train.events.size());
    const ResetSequence seq = reset_sequence(train, skip);
    r.transient_skip = skip;
    r.pattern_tolerance = default_tolerance(seq);
    r.pattern = classify_pattern(seq, r.pattern_tolerance, kDefaultMaxPeriod);
  }
  return out;
}

std::filesystem::path resolve_output(const std::filesystem::path& out_dir, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : out_dir / p;
}

BenchReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunOutput out;
  try {
    out = execute(config, config.repeat);
  } catch (const Error& e) {
    if (!config.outputs.report.empty() && !is_validation_error(e.kind())) {
      write_file(resolve_output(out_dir, config.outputs.report), error_report_json(config, e));
    }
    throw;
  }
  if (!config.outputs.trajectory.empty()) {
    std::ostringstream ss;
    write_trajectory_csv(ss, out.result.trajectory);
    write_file(resolve_output(out_dir, config.outputs.trajectory), ss.str());
  }
  if (!config.outputs.spikes.empty()) {
    std::ostringstream ss;
    write_spikes_csv(ss, out.result.train);
    write_file(resolve_output(out_dir, config.outputs.spikes), ss.str());
  }
  if (!config.outputs.report.empty()) {
    write_file(resolve_output(out_dir, config.outputs.report), report_json(config, out.report));
  }
  return out.report;
}

std::vector<ComparisonRow> run_comparison(const std::vector<ExperimentConfig>& configs) {
  if (configs.size() < 2) throw Error(ErrorKind::config, "comparison needs at least two configs");
  for (std::size_t i = 1; i < configs.size(); ++i) {
    if (!same_setup(configs[0], configs[i])) {
      throw Error(ErrorKind::config, "config '" + configs[i].name + "' does not share model, current and init with '" +
                                         configs[0].name + "'");
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& c : configs) rows.push_back({c.name, execute(c, c.repeat).report, std::nullopt, std::nullopt});
  const auto oracle = std::find_if(rows.begin(), rows.end(),
                                   [](const ComparisonRow& r) { return r.report.scheme == Scheme::oracle; });
  if (oracle != rows.end() && oracle->report.first_spike_time) {
    const double t_ref = *oracle->report.first_spike_time;
    const double w_ref = *oracle->report.first_spike_w;
    for (auto& r : rows) {
      if (r.report.first_spike_time) {
        r.first_spike_delta = *r.report.first_spike_time - t_ref;
        r.first_w_delta = *r.report.first_spike_w - w_ref;
      }
    }
  }
  return rows;
}

std::vector<ErrorSweepRow> run_error_sweep(const ExperimentConfig& base, const std::vector<double>& taus,
                                           const std::vector<double>& thetas) {
  if (taus.empty()) throw Error(ErrorKind::config, "error sweep: empty tau list");
  if (thetas.empty()) throw Error(ErrorKind::config, "error sweep: empty theta list");
  std::vector<ErrorSweepRow> rows;
  for (double theta : thetas) {
    for (double tau : taus) {
      ExperimentConfig cfg = base;
      cfg.solver.theta = theta;
      switch (cfg.solver.scheme) {
        case Scheme::euler:
        case Scheme::hybrid_fixed: cfg.solver.dt = tau; break;
        case Scheme::hybrid_adaptive: cfg.solver.epsilon = tau; break;
        case Scheme::oracle: cfg.solver.oracle_tol = tau; break;
      }
      validate(cfg);
      const ErrorReport rep =
          measure_empirical_error(cfg.model, cfg.current, cfg.init, cfg.solver, base.solver.oracle_tol);
      rows.push_back({theta, tau, rep.spike_time_error, rep.w_at_spike_error});
    }
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "t,v,w,branch\n";
  for (const auto& r : rows) {
    out << format_number(r.t) << ',' << format_number(r.v) << ',' << format_number(r.w) << ','
        << to_string(r.branch) << '\n';
  }
}

void write_spikes_csv(std::ostream& out, const SpikeTrain& train) {
  out << "index,spike_time,w_at_spike\n";
  for (std::size_t i = 0; i < train.events.size(); ++i) {
    out << i << ',' << format_number(train.events[i].spike_time) << ','
        << format_number(train.events[i].w_at_spike) << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  auto opt = [](const std::optional<double>& x) { return x ? format_number(*x) : std::string(); };
  out << "name,scheme,step_count,wall_time_median,spike_count,first_spike_time,first_spike_delta,first_w_delta,"
         "pattern\n";
  for (const auto& r : rows) {
    out << r.name << ',' << to_string(r.report.scheme) << ',' << r.report.step_count << ','
        << format_number(r.report.wall_time_median) << ',' << r.report.spike_count << ','
        << opt(r.report.first_spike_time) << ',' << opt(r.first_spike_delta) << ',' << opt(r.first_w_delta) << ','
        << (r.report.pattern ? r.report.pattern->name() : std::string()) << '\n';
  }
}

void write_error_sweep_csv(std::ostream& out, const std::vector<ErrorSweepRow>& rows) {
  out << "theta,tau,spike_time_error,w_error\n";
  for (const auto& r : rows) {
    out << format_number(r.theta) << ',' << format_number(r.tau) << ',' << format_number(r.spike_time_error) << ','
        << format_number(r.w_error) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
  out << "bin_center,count\n";
  for (const auto& b : bins) out << format_number(b.center) << ',' << b.count << '\n';
}

SpikeTrain read_spikes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::data, "spike CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "index,spike_time,w_at_spike") {
    throw Error(ErrorKind::data, "spike CSV header must be 'index,spike_time,w_at_spike'");
  }
  SpikeTrain train;
  int line_no = 1;
  auto field = [&](std::string_view s) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorKind::data, "spike CSV line " + std::to_string(line_no) + ": bad number '" +
                                       std::string(s) + "'");
    }
    return x;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw Error(ErrorKind::data, "spike CSV line " + std::to_string(line_no) + ": expected 3 columns");
    }
    const std::string_view sv(line);
    field(sv.substr(0, c1));
    const double t = field(sv.substr(c1 + 1, c2 - c1 - 1));
    const double w = field(sv.substr(c2 + 1));
    if (!train.events.empty() && !(t > train.events.back().spike_time)) {
      throw Error(ErrorKind::data, "spike CSV line " + std::to_string(line_no) + ": spike times must increase");
    }
    train.events.push_back({t, w});
  }
  train.step_count = static_cast<std::int64_t>(train.events.size());
  return train;
}

std::string report_json(const ExperimentConfig& config, const BenchReport& r) {
  json doc = {{"status", "ok"},
              {"config", config_json(config)},
              {"result",
               {{"scheme", to_string(r.scheme)},
                {"wall_time_median", r.wall_time_median},
                {"step_count", r.step_count},
                {"spike_count", r.spike_count},
                {"first_spike_time", optional_number(r.first_spike_time)},
                {"first_spike_w", optional_number(r.first_spike_w)},
                {"terminated_by", to_string(r.terminated_by)},
                {"pattern", pattern_fields(r.pattern, r.pattern_tolerance, r.transient_skip)}}}};
  return doc.dump(2) + "\n";
}

std::string error_report_json(const ExperimentConfig& config, const Error& error) {
  json doc = {{"status", "error"},
              {"config", config_json(config)},
              {"error", {{"kind", to_string(error.kind())}, {"message", error.what()}}}};
  return doc.dump(2) + "\n";
}

std::string pattern_json(const ResetSequence& seq, double tol, const PatternClass& pattern) {
  json doc = pattern_fields(pattern, tol, seq.transient_skip);
  doc["length"] = seq.values.size();
  return doc.dump(2) + "\n";
}

}  // namespace spikesim

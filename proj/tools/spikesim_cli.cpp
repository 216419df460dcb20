#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikesim/config.hpp"
#include "spikesim/errors.hpp"
#include "spikesim/experiment.hpp"
#include "spikesim/spiketrain.hpp"

namespace fs = std::filesystem;
using namespace spikesim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;

fs::path output_dir() {
  const char* env = std::getenv("SPIKESIM_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path.string() + "'");
  out << text;
}

void print_summary(const std::string& name, const BenchReport& r) {
  std::cout << name << ": scheme=" << to_string(r.scheme) << " steps=" << r.step_count
            << " spikes=" << r.spike_count;
  if (r.first_spike_time) std::cout << " first_spike=" << format_number(*r.first_spike_time);
  std::cout << " pattern=" << (r.pattern ? r.pattern->name() : std::string("n/a"))
            << " wall_time_median=" << format_number(r.wall_time_median) << "s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid time/phase-plane solver for bidimensional spiking neuron models"};
  app.require_subcommand(1);

  std::vector<std::string> overrides;
  auto add_set = [&](CLI::App* sub) {
    sub->add_option("--set", overrides, "Override a config value, e.g. solver.scheme=euler");
  };

  std::string sim_config;
  auto* simulate = app.add_subcommand("simulate", "Run one config and write trajectory, spikes and report");
  simulate->add_option("config", sim_config)->required();
  add_set(simulate);

  std::vector<std::string> cmp_configs;
  std::string cmp_out = "comparison.csv";
  auto* compare = app.add_subcommand("compare", "Benchmark several configs sharing model, current and init");
  compare->add_option("configs", cmp_configs)->required()->expected(2, -1);
  compare->add_option("--output", cmp_out, "Comparison CSV, relative to the output directory");
  add_set(compare);

  std::string sweep_config;
  std::vector<double> taus, thetas;
  std::string sweep_out = "error_sweep.csv";
  auto* sweep = app.add_subcommand("error-sweep", "First-spike error against the reference solver");
  sweep->add_option("config", sweep_config)->required();
  sweep->add_option("--taus", taus, "Step sizes (dt, or epsilon for hybrid-adaptive)")->required()->delimiter(',');
  sweep->add_option("--thetas", thetas, "Cutoff values")->required()->delimiter(',');
  sweep->add_option("--output", sweep_out, "Sweep CSV, relative to the output directory");
  add_set(sweep);

  std::string spikes_path;
  long skip = -1;
  double tol = -1.0;
  int max_period = kDefaultMaxPeriod;
  int bins = 20;
  auto* classify = app.add_subcommand("classify", "Classify the reset sequence of a spike CSV");
  classify->add_option("spikes", spikes_path)->required()->check(CLI::ExistingFile);
  classify->add_option("--skip", skip, "Transient events to drop (default max(10, 20%))");
  classify->add_option("--tol", tol, "Absolute tolerance (default 10% of the sequence range)");
  classify->add_option("--max-period", max_period)->check(CLI::PositiveNumber);
  classify->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);

  std::string bench_config;
  auto* bench = app.add_subcommand("bench", "Time a config (median of `repeat` runs) and print the report");
  bench->add_option("config", bench_config)->required();
  add_set(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const fs::path out_dir = output_dir();
    if (*simulate) {
      ExperimentConfig cfg = load_config(sim_config, overrides);
      cfg.repeat = 1;
      print_summary(cfg.name, run_experiment(cfg, out_dir));
    } else if (*compare) {
      std::vector<ExperimentConfig> cfgs;
      for (const auto& p : cmp_configs) cfgs.push_back(load_config(p, overrides));
      const auto rows = run_comparison(cfgs);
      std::ostringstream ss;
      write_comparison_csv(ss, rows);
      write_text(resolve_output(out_dir, cmp_out), ss.str());
      std::cout << ss.str();
    } else if (*sweep) {
      const ExperimentConfig cfg = load_config(sweep_config, overrides);
      const auto rows = run_error_sweep(cfg, taus, thetas);
      std::ostringstream ss;
      write_error_sweep_csv(ss, rows);
      write_text(resolve_output(out_dir, sweep_out), ss.str());
      std::cout << ss.str();
    } else if (*classify) {
      std::ifstream in(spikes_path);
      if (!in) throw Error(ErrorKind::data, "cannot open '" + spikes_path + "'");
      const SpikeTrain train = read_spikes_csv(in);
      const std::size_t n = train.events.size();
      const ResetSequence seq =
          reset_sequence(train, skip >= 0 ? static_cast<std::size_t>(skip) : default_transient_skip(n));
      const double t = tol >= 0.0 ? tol : default_tolerance(seq);
      std::cout << pattern_json(seq, t, classify_pattern(seq, t, max_period));
      std::ostringstream ss;
      write_histogram_csv(ss, reset_histogram(seq, bins));
      const fs::path hist = out_dir / (fs::path(spikes_path).stem().string() + "_histogram.csv");
      write_text(hist, ss.str());
    } else if (*bench) {
      const ExperimentConfig cfg = load_config(bench_config, overrides);
      const RunOutput out = execute(cfg, cfg.repeat);
      std::cout << report_json(cfg, out.report);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return is_validation_error(e.kind()) ? kExitValidation : kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spikesim/current.hpp"
#include "spikesim/integrators.hpp"
#include "spikesim/model.hpp"

namespace spikesim {

struct OutputPaths {
  std::string trajectory = "trajectory.csv";
  std::string spikes = "spikes.csv";
  std::string report = "report.json";
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelSpec model;
  InputCurrent current = InputCurrent::constant(0.0);
  SimState init;
  SolverConfig solver;
  OutputPaths outputs;
  std::uint64_t seed = 0;
  int repeat = 5;
};

/// Parses the flat key=value format:
///
///   name = izhikevich_burst
///   [model]    kind, p2, p1, p0, alpha, a, b, c, d
///   [current]  kind, value | initial, breakpoints | base, steps
///   [init]     t, v, w
///   [solver]   scheme, theta, M, dt, dv, epsilon, DT, DV, oracle_tol, t_end,
///              spike_interp, min_step, max_floored_steps, max_events, record_every
///   [outputs]  trajectory, spikes, report
///
/// Top-level keys: name, seed, repeat. Breakpoints are written "t:value, t:value".
/// `overrides` are "section.key=value" strings applied after the document.
/// Errors carry the line number and key.
ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Throws Error{config} when the assembled config violates an invariant.
void validate(const ExperimentConfig& config);

}  // namespace spikesim

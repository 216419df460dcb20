#include "spikesim/error_analysis.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "spikesim/errors.hpp"

namespace spikesim {

ModelClass ModelClass::of(const ModelSpec& model) {
  const auto m = model.growth_exponent();
  return m ? power(*m) : exponential();
}

namespace {

void check_class(const ModelClass& cls) {
  if (cls.kind == ModelClass::Kind::power && !(std::isfinite(cls.m) && cls.m > 1.0)) {
    throw Error(ErrorKind::argument, "power class requires m > 1");
  }
}

void check_range(const ModelClass& cls, double v, double v0) {
  check_class(cls);
  if (!std::isfinite(v) || !std::isfinite(v0) || v < v0) {
    throw Error(ErrorKind::argument, "error curves require finite v >= v0");
  }
  if (cls.kind == ModelClass::Kind::power && !(v0 > 0.0)) {
    throw Error(ErrorKind::argument, "power class requires v0 > 0");
  }
}

// ln F(u) - ln F(v0)
double log_ratio(const ModelClass& cls, double u, double v0) {
  return cls.kind == ModelClass::Kind::power ? cls.m * std::log(u / v0) : u - v0;
}

// int_{v0}^{u} ds / F(s)
double inverse_F_integral(const ModelClass& cls, double u, double v0) {
  if (cls.kind == ModelClass::Kind::power) {
    return (std::pow(u, 1.0 - cls.m) - std::pow(v0, 1.0 - cls.m)) / (1.0 - cls.m);
  }
  return std::exp(-v0) - std::exp(-u);
}

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;

  double whole(double lo, double hi, double flo, double fmid, double fhi) const {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  }

  double recurse(double lo, double hi, double flo, double fmid, double fhi, double S, double tol,
                 int depth) const {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = whole(lo, mid, flo, flm, fmid);
    const double right = whole(mid, hi, fmid, frm, fhi);
    const double diff = left + right - S;
    if (std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    if (depth >= max_depth || !std::isfinite(diff)) {
      throw Error(ErrorKind::numerical, "adaptive quadrature did not converge");
    }
    return recurse(lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1) +
           recurse(mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1);
  }

  double operator()(double lo, double hi, double tol) const {
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fmid = f(0.5 * (lo + hi));
    return recurse(lo, hi, flo, fmid, fhi, whole(lo, hi, flo, fmid, fhi), tol, 0);
  }
};

}  // namespace

double error_A(const ModelClass& cls, double v, double v0) {
  check_range(cls, v, v0);
  if (cls.kind == ModelClass::Kind::power) {
    return -0.5 * cls.m * std::pow(v, cls.m) * std::log(v / v0);
  }
  return -0.5 * (v - v0) * std::exp(v);
}

double error_B(const ModelClass& cls, double v, double v0, double a, double b) {
  check_range(cls, v, v0);
  if (!(a >= 0.0) || !(b >= 0.0)) throw Error(ErrorKind::argument, "error_B requires a, b >= 0");
  if (v == v0 || a == 0.0 || b == 0.0) return 0.0;
  const double phi_v = a * inverse_F_integral(cls, v, v0);
  const std::function<double(double)> integrand = [&](double u) {
    const double weight = std::exp(a * inverse_F_integral(cls, u, v0) - phi_v);
    return weight * (log_ratio(cls, u, v0) + 1.0);
  };
  const double integral = Simpson{integrand, 60}(v0, v, 1e-10);
  return -0.5 * a * b * integral;
}

double spike_time_delay(const ModelClass& cls, double theta, double y0, double tau) {
  check_range(cls, theta, y0);
  if (!(tau > 0.0)) throw Error(ErrorKind::argument, "spike_time_delay requires tau > 0");
  if (cls.kind == ModelClass::Kind::power) return tau * 0.5 * cls.m * std::log(theta / y0);
  return tau * 0.5 * (theta - y0);
}

double onedim_blowup_time(const ModelClass& cls, double y0) {
  check_class(cls);
  if (cls.kind == ModelClass::Kind::power) {
    if (!(y0 > 0.0)) throw Error(ErrorKind::argument, "power blow-up requires y0 > 0");
    return std::pow(y0, 1.0 - cls.m) / (cls.m - 1.0);
  }
  return std::exp(-y0);
}

double onedim_blowup_solution(const ModelClass& cls, double y0, double t) {
  const double t_star = onedim_blowup_time(cls, y0);
  if (!(t < t_star)) {
    throw Error(ErrorKind::range, "t = " + std::to_string(t) + " is past the blow-up time " +
                                      std::to_string(t_star));
  }
  if (cls.kind == ModelClass::Kind::power) {
    return std::pow(std::pow(y0, 1.0 - cls.m) - (cls.m - 1.0) * t, 1.0 / (1.0 - cls.m));
  }
  return y0 - std::log1p(-t * std::exp(y0));
}

std::vector<ErrorCurvePoint> error_vs_cutoff_curve(const ModelClass& cls, double v0, double a, double b,
                                                   const std::vector<double>& thetas) {
  std::vector<ErrorCurvePoint> out;
  out.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (i > 0 && !(thetas[i] > thetas[i - 1])) {
      throw Error(ErrorKind::argument, "theta list must be strictly increasing");
    }
    out.push_back({thetas[i], error_A(cls, thetas[i], v0), error_B(cls, thetas[i], v0, a, b)});
  }
  return out;
}

ErrorReport measure_empirical_error(const ModelSpec& model, const InputCurrent& current,
                                    const SimState& init, const SolverConfig& scheme_config,
                                    double oracle_tol) {
  SolverConfig cfg = scheme_config;
  cfg.max_events = 1;
  cfg.record_every = 0;
  SolverConfig ref = cfg;
  ref.scheme = Scheme::oracle;
  ref.oracle_tol = oracle_tol;
  ref.spike_interp = SpikeInterp::first_exceedance;

  const auto run = simulate(model, current, init, cfg);
  const auto oracle = reference_solve(model, current, init, ref);
  if (run.train.events.empty() || oracle.train.events.empty()) {
    throw Error(ErrorKind::measurement, "no spike before t_end");
  }
  ErrorReport rep;
  rep.spike_time_error = run.train.events.front().spike_time - oracle.train.events.front().spike_time;
  rep.w_at_spike_error = run.train.events.front().w_at_spike - oracle.train.events.front().w_at_spike;
  rep.theta = cfg.theta;
  switch (cfg.scheme) {
    case Scheme::euler:
    case Scheme::hybrid_fixed: rep.tau_or_eps = cfg.dt; break;
    case Scheme::hybrid_adaptive: rep.tau_or_eps = cfg.epsilon; break;
    case Scheme::oracle: rep.tau_or_eps = cfg.oracle_tol; break;
  }
  return rep;
}

}  // namespace spikesim

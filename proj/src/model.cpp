#include "spikesim/model.hpp"

#include <cmath>
#include <string>

#include "spikesim/errors.hpp"

namespace spikesim {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::range: return "range";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::analysis: return "analysis";
    case ErrorKind::invertibility: return "invertibility";
    case ErrorKind::step: return "step";
    case ErrorKind::stagnation: return "stagnation";
    case ErrorKind::oracle: return "oracle";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::argument: return "argument";
    case ErrorKind::data: return "data";
    case ErrorKind::measurement: return "measurement";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

bool is_finite(const SimState& s) noexcept {
  return std::isfinite(s.t) && std::isfinite(s.v) && std::isfinite(s.w);
}

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::quadratic_izhikevich: return "quadratic-izhikevich";
    case ModelKind::canonical_quadratic: return "canonical-quadratic";
    case ModelKind::quartic: return "quartic";
    case ModelKind::exponential: return "exponential";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  if (name == "quadratic-izhikevich") return ModelKind::quadratic_izhikevich;
  if (name == "canonical-quadratic") return ModelKind::canonical_quadratic;
  if (name == "quartic") return ModelKind::quartic;
  if (name == "exponential") return ModelKind::exponential;
  return std::nullopt;
}

ModelSpec ModelSpec::izhikevich(double p2, double p1, double p0, double a, double b, double c,
                                double d) {
  ModelSpec m;
  m.kind = ModelKind::quadratic_izhikevich;
  m.p2 = p2;
  m.p1 = p1;
  m.p0 = p0;
  m.a = a;
  m.b = b;
  m.c = c;
  m.d = d;
  return m;
}

ModelSpec ModelSpec::canonical_quadratic(double a, double b, double c, double d) {
  ModelSpec m;
  m.kind = ModelKind::canonical_quadratic;
  m.a = a;
  m.b = b;
  m.c = c;
  m.d = d;
  return m;
}

ModelSpec ModelSpec::quartic(double alpha, double a, double b, double c, double d) {
  ModelSpec m;
  m.kind = ModelKind::quartic;
  m.alpha = alpha;
  m.a = a;
  m.b = b;
  m.c = c;
  m.d = d;
  return m;
}

ModelSpec ModelSpec::exponential(double a, double b, double c, double d) {
  ModelSpec m;
  m.kind = ModelKind::exponential;
  m.a = a;
  m.b = b;
  m.c = c;
  m.d = d;
  return m;
}

namespace {

void check_argument(const ModelSpec& model, double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::range, "F evaluated at non-finite v");
  }
  if (model.kind == ModelKind::exponential && v > kExpOverflowGuard) {
    throw Error(ErrorKind::range,
                "exponential F evaluated above overflow guard (v=" + std::to_string(v) + ")");
  }
}

}  // namespace

double eval_F(const ModelSpec& model, double v) {
  check_argument(model, v);
  switch (model.kind) {
    case ModelKind::quadratic_izhikevich: return (model.p2 * v + model.p1) * v + model.p0;
    case ModelKind::canonical_quadratic: return v * v;
    case ModelKind::quartic: {
      const double v2 = v * v;
      return v2 * v2 + model.alpha * v;
    }
    case ModelKind::exponential: return std::exp(v) - v;
  }
  return 0.0;
}

std::pair<double, double> eval_F_derivatives(const ModelSpec& model, double v) {
  check_argument(model, v);
  switch (model.kind) {
    case ModelKind::quadratic_izhikevich: return {2.0 * model.p2 * v + model.p1, 2.0 * model.p2};
    case ModelKind::canonical_quadratic: return {2.0 * v, 2.0};
    case ModelKind::quartic: return {4.0 * v * v * v + model.alpha, 12.0 * v * v};
    case ModelKind::exponential: {
      const double e = std::exp(v);
      return {e - 1.0, e};
    }
  }
  return {0.0, 0.0};
}

double ModelSpec::F(double v) const { return eval_F(*this, v); }
double ModelSpec::dF(double v) const { return eval_F_derivatives(*this, v).first; }
double ModelSpec::d2F(double v) const { return eval_F_derivatives(*this, v).second; }

std::optional<double> ModelSpec::growth_exponent() const noexcept {
  switch (kind) {
    case ModelKind::quadratic_izhikevich:
    case ModelKind::canonical_quadratic: return 2.0;
    case ModelKind::quartic: return 4.0;
    case ModelKind::exponential: return std::nullopt;
  }
  return std::nullopt;
}

void validate(const ModelSpec& model) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, msg); };
  for (double x : {model.p2, model.p1, model.p0, model.alpha, model.a, model.b, model.c, model.d}) {
    if (!std::isfinite(x)) fail("model coefficients must be finite");
  }
  if (model.a < 0.0) fail("model.a must be >= 0");
  if (model.b < 0.0) fail("model.b must be >= 0");
  if (model.d <= 0.0) fail("model.d must be > 0");
  if (model.kind == ModelKind::quadratic_izhikevich && model.p2 <= 0.0) {
    fail("model.p2 must be > 0 (F must be strictly convex)");
  }
}

}  // namespace spikesim

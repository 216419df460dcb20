#pragma once

#include <concepts>
#include <optional>
#include <string_view>
#include <utility>

namespace spikesim {

/// Point (t, v, w) on an orbit. In phase-plane mode the same fields hold
/// (T(v), v, W(v)).
struct SimState {
  double t = 0.0;
  double v = 0.0;
  double w = 0.0;

  friend bool operator==(const SimState&, const SimState&) = default;
};

bool is_finite(const SimState& s) noexcept;

enum class ModelKind { quadratic_izhikevich, canonical_quadratic, quartic, exponential };

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

/// Exponential nonlinearity refuses arguments above this value.
inline constexpr double kExpOverflowGuard = 700.0;

/// Bidimensional model  v' = F(v) - w + I,  w' = a (b v - w),  with reset
/// v -> c, w -> w + d when v reaches the cutoff.
///
/// F is one of four fixed families:
///   quadratic_izhikevich  F(v) = p2 v^2 + p1 v + p0
///   canonical_quadratic   F(v) = v^2
///   quartic               F(v) = v^4 + alpha v
///   exponential           F(v) = e^v - v
struct ModelSpec {
  ModelKind kind = ModelKind::canonical_quadratic;
  double p2 = 1.0;
  double p1 = 0.0;
  double p0 = 0.0;
  double alpha = 0.0;

  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  static ModelSpec izhikevich(double p2, double p1, double p0, double a, double b, double c, double d);
  static ModelSpec canonical_quadratic(double a, double b, double c, double d);
  static ModelSpec quartic(double alpha, double a, double b, double c, double d);
  static ModelSpec exponential(double a, double b, double c, double d);

  double F(double v) const;
  double dF(double v) const;
  double d2F(double v) const;

  /// Exponent m of the dominant power term; empty for the exponential family.
  std::optional<double> growth_exponent() const noexcept;
};

double eval_F(const ModelSpec& model, double v);

/// (F'(v), F''(v)).
std::pair<double, double> eval_F_derivatives(const ModelSpec& model, double v);

/// Throws Error{config} when a parameter violates a model invariant
/// (a >= 0, b >= 0, d > 0, convex F, finite coefficients).
void validate(const ModelSpec& model);

/// Anything the integrators can step: a convex drive F with its slope plus the
/// four adaptation/reset parameters.
template <class M>
concept SpikingModel = requires(const M& m, double v) {
  { m.F(v) } -> std::convertible_to<double>;
  { m.dF(v) } -> std::convertible_to<double>;
  { m.a } -> std::convertible_to<double>;
  { m.b } -> std::convertible_to<double>;
  { m.c } -> std::convertible_to<double>;
  { m.d } -> std::convertible_to<double>;
};

}  // namespace spikesim

#pragma once

// Incident waves and the Dirichlet data they induce: the windowed plane wave
// of the exterior experiments and the radially symmetric Gaussian pulse of
// the interior experiment.

#include <vector>

#include "wavecq/common.hpp"

namespace wavecq {

struct WindowedPlaneWave {
  double omega = 1.0;
  /// Unit propagation direction.
  Point alpha{0.0, -1.0};
  double delay = 4.0;
  double width = 0.7;

  bool operator==(const WindowedPlaneWave&) const = default;
};

struct GaussianPulse {
  double a = 10.0;
  Point x0{0.25, 0.0};

  bool operator==(const GaussianPulse&) const = default;
};

enum class IncidentKind { PlaneWave, Gaussian };

struct IncidentSpec {
  IncidentKind kind = IncidentKind::PlaneWave;
  WindowedPlaneWave plane;
  GaussianPulse gaussian;

  /// Throws ConfigError unless width > 0, |alpha| = 1 and a > 0.
  void validate() const;
  bool operator==(const IncidentSpec&) const = default;
};

/// e^{-(t/width)^2}
[[nodiscard]] double window(double t, double width);

/// sin(omega (t - x.alpha)) window(t - delay - x.alpha), the negative of the
/// plane wave below.
[[nodiscard]] double dirichlet_data(double t, const Point& x, const WindowedPlaneWave& spec);

/// u^inc(t, x) = -sin(omega (t - x.alpha)) window(t - delay - x.alpha).
[[nodiscard]] double plane_wave(double t, const Point& x, const WindowedPlaneWave& spec);

/// Radial solution of the wave equation with initial value
/// e^{-a^2 |x - x0|^2 / 2} and zero initial velocity,
///   int_0^inf a^{-2} e^{-k^2/(2a^2)} J_0(k r) k cos(k t) dk,
/// by Gauss-Legendre on [0, a sqrt(2 ln 1e16)] with about eight nodes per
/// oscillation of J_0(k r) cos(k t). Requires t >= 0.
[[nodiscard]] double gaussian_incident(const Point& x, double t, const GaussianPulse& spec);

/// gaussian_incident at one point for many times, with one rule sized for the
/// latest time so the Bessel factors are computed once.
[[nodiscard]] std::vector<double> gaussian_incident_history(const Point& x, const std::vector<double>& times,
                                                            const GaussianPulse& spec);

/// The incident field u^inc of either kind.
[[nodiscard]] double incident_field(double t, const Point& x, const IncidentSpec& spec);

/// Dirichlet data -u^inc of either kind.
[[nodiscard]] double boundary_data(double t, const Point& x, const IncidentSpec& spec);

}  // namespace wavecq

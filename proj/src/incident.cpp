#include "wavecq/incident.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavecq/errors.hpp"
#include "wavecq/quadrature.hpp"

namespace wavecq {

namespace {

constexpr double kTailTolerance = 1e-16;
constexpr double kOversampling = 8.0;
constexpr std::size_t kMinNodes = 32;

}  // namespace

void IncidentSpec::validate() const {
  if (kind == IncidentKind::PlaneWave) {
    if (!(plane.width > 0.0)) throw ConfigError("incident: window width must be positive");
    if (std::abs(plane.alpha.norm() - 1.0) > 1e-12) throw ConfigError("incident: direction must have unit length");
    if (!std::isfinite(plane.omega) || !std::isfinite(plane.delay)) {
      throw ConfigError("incident: omega and delay must be finite");
    }
  } else if (!(gaussian.a > 0.0)) {
    throw ConfigError("incident: Gaussian parameter a must be positive");
  }
}

double window(double t, double width) {
  const double x = t / width;
  return std::exp(-x * x);
}

double dirichlet_data(double t, const Point& x, const WindowedPlaneWave& spec) {
  const double phase = t - x.dot(spec.alpha);
  return std::sin(spec.omega * phase) * window(phase - spec.delay, spec.width);
}

double plane_wave(double t, const Point& x, const WindowedPlaneWave& spec) { return -dirichlet_data(t, x, spec); }

std::vector<double> gaussian_incident_history(const Point& x, const std::vector<double>& times,
                                              const GaussianPulse& spec) {
  if (times.empty()) return {};
  const double tmax = *std::max_element(times.begin(), times.end());
  if (!(*std::min_element(times.begin(), times.end()) >= 0.0)) {
    throw std::invalid_argument("gaussian_incident: t must be non-negative");
  }
  const double r = (x - spec.x0).norm();
  const double a2 = spec.a * spec.a;
  const double kmax = spec.a * std::sqrt(2.0 * std::log(1.0 / kTailTolerance));
  const double wanted = kmax * (tmax + r) / (2.0 * kPi) * kOversampling;
  // rounded up to a multiple of 32 so that only a few rules get cached
  std::size_t n = std::max<std::size_t>(kMinNodes, static_cast<std::size_t>(std::ceil(wanted)));
  n = (n + 31) / 32 * 32;
  const GaussRule& rule = gauss_legendre(n);
  std::vector<double> k(n), radial(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = kmax * rule.nodes[i];
    radial[i] = kmax * rule.weights[i] * std::exp(-0.5 * k[i] * k[i] / a2) / a2 * std::cyl_bessel_j(0.0, k[i] * r) * k[i];
  }
  std::vector<double> out(times.size());
  for (std::size_t m = 0; m < times.size(); ++m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += radial[i] * std::cos(k[i] * times[m]);
    out[m] = sum;
  }
  return out;
}

double gaussian_incident(const Point& x, double t, const GaussianPulse& spec) {
  return gaussian_incident_history(x, {t}, spec).front();
}

double incident_field(double t, const Point& x, const IncidentSpec& spec) {
  return spec.kind == IncidentKind::PlaneWave ? plane_wave(t, x, spec.plane) : gaussian_incident(x, t, spec.gaussian);
}

double boundary_data(double t, const Point& x, const IncidentSpec& spec) { return -incident_field(t, x, spec); }

}  // namespace wavecq

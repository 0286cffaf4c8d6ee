#pragma once

#include <complex>
#include <limits>
#include <numbers>

#include <Eigen/Core>

namespace wavecq {

using cplx = std::complex<double>;

/// A point in the plane. The 3D kernel is only ever evaluated through distances.
using Point = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;
inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

}  // namespace wavecq

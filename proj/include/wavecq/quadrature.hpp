#pragma once

#include <cstddef>
#include <vector>

namespace wavecq {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [0, 1] (n >= 1). Rules are computed
/// once by Newton iteration on P_n and cached; the returned reference stays
/// valid for the lifetime of the program.
[[nodiscard]] const GaussRule& gauss_legendre(std::size_t n);

}  // namespace wavecq

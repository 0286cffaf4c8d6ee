#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "wavecq/common.hpp"

/// Discrete Fourier transforms of length L with zeta_L = exp(2 pi i / L):
///   forward  X_k = sum_n x_n zeta_L^{-kn}
///   inverse  x_n = (1/L) sum_k X_k zeta_L^{kn}
/// Every transform in the library goes through these functions.
namespace wavecq::dft {

std::vector<cplx> forward(std::span<const cplx> x);
std::vector<cplx> inverse(std::span<const cplx> x);

/// Transform every column of `data` in place (column length = transform length).
void forward_columns(Eigen::MatrixXcd& data);
void inverse_columns(Eigen::MatrixXcd& data);

}  // namespace wavecq::dft

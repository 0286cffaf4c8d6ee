#include "wavecq/dft.hpp"

#include <mutex>

#include <fftw3.h>

namespace wavecq::dft {
namespace {

// The FFTW planner is not re-entrant; execution of a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform_columns(cplx* data, int length, int columns, int sign) {
  if (length == 0 || columns == 0) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_many_dft(1, &length, columns, buf, nullptr, 1, length, buf, nullptr, 1,
                              length, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

std::vector<cplx> forward(std::span<const cplx> x) {
  std::vector<cplx> out(x.begin(), x.end());
  transform_columns(out.data(), static_cast<int>(out.size()), 1, FFTW_FORWARD);
  return out;
}

std::vector<cplx> inverse(std::span<const cplx> x) {
  std::vector<cplx> out(x.begin(), x.end());
  transform_columns(out.data(), static_cast<int>(out.size()), 1, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

void forward_columns(Eigen::MatrixXcd& data) {
  transform_columns(data.data(), static_cast<int>(data.rows()), static_cast<int>(data.cols()),
                    FFTW_FORWARD);
}

void inverse_columns(Eigen::MatrixXcd& data) {
  transform_columns(data.data(), static_cast<int>(data.rows()), static_cast<int>(data.cols()),
                    FFTW_BACKWARD);
  if (data.rows() > 0) data /= static_cast<double>(data.rows());
}

}  // namespace wavecq::dft

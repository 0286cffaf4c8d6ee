#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavecq {

/// Argument outside the domain of a generating function or kernel.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Trapezoidal generating function evaluated at its pole zeta = -1.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Sizes of weights, vectors or grids do not line up.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A transfer function threw while being sampled on the contour.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::size_t frequency_index, const std::string& what)
      : std::runtime_error("transfer function failed at frequency " +
                           std::to_string(frequency_index) + ": " + what),
        frequency_index_(frequency_index) {}
  [[nodiscard]] std::size_t frequency_index() const noexcept { return frequency_index_; }

 private:
  std::size_t frequency_index_;
};

/// Transfer function cannot be expanded by the power-series oracle.
class UnsupportedTransfer : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A square frequency-domain system could not be solved.
class SingularSystem : public std::runtime_error {
 public:
  SingularSystem(std::size_t frequency_index, const std::string& what)
      : std::runtime_error("singular system at frequency " + std::to_string(frequency_index) +
                           ": " + what),
        frequency_index_(frequency_index) {}
  [[nodiscard]] std::size_t frequency_index() const noexcept { return frequency_index_; }

 private:
  std::size_t frequency_index_;
};

/// Marching-on-in-time cannot proceed because the zeroth weight is not invertible.
class MotInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time grids of two field histories are not nested.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(std::size_t i, std::size_t j, const std::string& what)
      : std::runtime_error("quadrature failed for panel pair (" + std::to_string(i) + ", " +
                           std::to_string(j) + "): " + what),
        i_(i),
        j_(j) {}
  [[nodiscard]] std::size_t row() const noexcept { return i_; }
  [[nodiscard]] std::size_t col() const noexcept { return j_; }

 private:
  std::size_t i_, j_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavecq

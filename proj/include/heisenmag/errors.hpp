#pragma once

#include <stdexcept>
#include <string>

namespace heisenmag {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (bad grid, wrong mode, bad k...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Evaluation at the group identity where rho vanishes.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

// Cylindrical frame (R, Phi) requested on the center line r = 0.
class SingularFrameError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature ran out of subdivisions.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double achieved)
      : Error(what), achieved_error(achieved) {}
  double achieved_error;
};

// Iterative solver hit its cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double res)
      : Error(what), residual(res) {}
  double residual;
};

// Eigenfunction has too much mass near the truncation boundary.
class TruncationError : public ConvergenceError {
 public:
  TruncationError(const std::string& what, double mass, double suggested)
      : ConvergenceError(what, mass), suggested_halfwidth(suggested) {}
  double suggested_halfwidth;
};

}  // namespace heisenmag

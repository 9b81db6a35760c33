#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gkp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatI = Eigen::MatrixXi;
using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Lattice constant: GKP generator matrices are stored in units of ell.
inline const double kEll = std::sqrt(2.0 * std::numbers::pi);
inline const double kSqrtPi = std::sqrt(std::numbers::pi);

enum class ErrorCode {
  InvalidDimension,
  NotPositiveDefinite,
  InvalidGain,
  InvalidModes,
  InvalidTransmittance,
  InvalidParameter,
  NotIntegral,
  InvalidCodeDimension,
  UnsupportedCodeDimension,
  SearchBoundTooSmall,
  NotInDual,
  ConcatenationInvalid,
  SingularBasis,
  NonCanonicalAncilla,
  NumericalSingularity,
  TruncationTooSmall,
  NumericalInstability,
  StepTooLarge,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Centered residue of x modulo m, in [-m/2, m/2).
inline double centered_mod(double x, double m) {
  double r = x - m * std::floor(x / m + 0.5);
  if (r >= 0.5 * m) r -= m;
  if (r < -0.5 * m) r += m;
  return r;
}

}  // namespace gkp

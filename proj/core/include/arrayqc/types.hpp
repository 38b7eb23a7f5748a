#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace arrayqc {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Code units: gamma_L = lambda_L = hbar = c = 1, so k = omega = 2 pi.
inline constexpr double kWavenumber = 2.0 * kPi;

// Bad user input (config keys, out-of-range specs). Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Solver breakdown: singular resolvent, step underflow, no subradiant window.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arrayqc

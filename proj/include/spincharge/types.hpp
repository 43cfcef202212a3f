#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace spincharge {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// (2*pi)^{-3/2}, the Fourier normalization used throughout
inline constexpr double fourier_norm = 0.063493635934240969;

// Plain cross product. Eigen's cross() conjugates the result for complex scalars,
// which is never what the field algebra wants.
inline CVec3 ccross(const CVec3& a, const CVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Argument outside the domain of a pure function (negative radius, etc.).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Invalid configuration or violated precondition; the CLI maps this to exit 2.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A time integration left its energy tolerance band; the CLI maps this to exit 3.
struct DriftAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spincharge

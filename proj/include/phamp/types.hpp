#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace phamp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Error taxonomy. The CLI maps UsageError to exit code 2 and every
// NumericalError subclass to exit code 3.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ResonanceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnsupportedCaseError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline double wrap_phase(double theta)
{
    double w = theta - std::floor(theta);
    return w >= 1.0 ? 0.0 : w;
}

// Signed distance between two phases on the circle, in (-1/2, 1/2].
inline double phase_distance(double a, double b)
{
    double d = a - b;
    d -= std::round(d);
    return d;
}

} // namespace phamp

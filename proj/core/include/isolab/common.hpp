#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isolab {

using Point = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

/// Volume of the Euclidean unit ball in R^n, pi^{n/2} / Gamma(n/2 + 1).
inline double unit_ball_volume(int n) {
    return std::exp(0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0));
}

/// Surface measure of the unit sphere S^{n-1}, n * omega_n.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

inline Point unit_vector(int n, int axis) {
    Point e = Point::Zero(n);
    e(axis) = 1.0;
    return e;
}

inline Point polar_direction(double angle) {
    Point u(2);
    u << std::cos(angle), std::sin(angle);
    return u;
}

// Error hierarchy. Each subclass maps to one failure family named in the
// module contracts; callers that only care about "it failed" catch Error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ToleranceError : public Error {
public:
    ToleranceError(const std::string& what, double best_value, double achieved)
        : Error(what), best_value_(best_value), achieved_(achieved) {}
    double best_value() const { return best_value_; }
    double achieved_tolerance() const { return achieved_; }

private:
    double best_value_;
    double achieved_;
};

class InconclusiveError : public Error {
public:
    using Error::Error;
};

class DegenerateRatioError : public Error {
public:
    using Error::Error;
};

class CompensationError : public Error {
public:
    using Error::Error;
};

class PlacementError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    NotFoundError(const std::string& what, double best_slack)
        : Error(what), best_slack_(best_slack) {}
    double best_slack() const { return best_slack_; }

private:
    double best_slack_;
};

class ConstructionError : public Error {
public:
    using Error::Error;
};

class DescentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace isolab

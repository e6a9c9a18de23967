#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bhsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

// Base of every error raised by the library. `kind()` is a stable tag used in
// diagnostics and in the CLI's exit-code mapping.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define BHSIM_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name, what) {}        \
    }

BHSIM_DEFINE_ERROR(PreconditionError);
BHSIM_DEFINE_ERROR(PackingInfeasible);
BHSIM_DEFINE_ERROR(UnknownBalloon);
BHSIM_DEFINE_ERROR(UnknownMount);
BHSIM_DEFINE_ERROR(NumericalFailure);
BHSIM_DEFINE_ERROR(DegenerateCircle);
BHSIM_DEFINE_ERROR(DegenerateCell);
BHSIM_DEFINE_ERROR(DuplicateGenerators);
BHSIM_DEFINE_ERROR(NoSurvivors);
BHSIM_DEFINE_ERROR(UnknownClaim);
BHSIM_DEFINE_ERROR(InvariantViolation);

#undef BHSIM_DEFINE_ERROR

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

}  // namespace bhsim

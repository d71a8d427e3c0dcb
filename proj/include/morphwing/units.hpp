#pragma once

#include <numbers>

namespace morphwing {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kStandardGravity = 9.80665; // m/s^2

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// gram-force <-> newton
constexpr double newton_to_gram(double n) { return n / kStandardGravity * 1000.0; }
constexpr double gram_to_newton(double g) { return g * kStandardGravity / 1000.0; }

} // namespace morphwing

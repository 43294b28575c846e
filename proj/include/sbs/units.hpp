#pragma once

#include <numbers>

namespace sbs::units {

// International nautical mile expressed in feet (1852 m / 0.3048 m).
inline constexpr double kFeetPerNmi = 1852.0 / 0.3048;
inline constexpr double kFtPerSecPerKnot = kFeetPerNmi / 3600.0;
inline constexpr double kGravityFtPerSec2 = 32.174049;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
inline constexpr double kArcminPerRad = 60.0 * kRadToDeg;

constexpr double knots_to_fps(double kts) { return kts * kFtPerSecPerKnot; }
constexpr double fps_to_knots(double fps) { return fps / kFtPerSecPerKnot; }
constexpr double nmi_to_ft(double nmi) { return nmi * kFeetPerNmi; }
constexpr double ft_to_nmi(double ft) { return ft / kFeetPerNmi; }
constexpr double fpm_to_fps(double fpm) { return fpm / 60.0; }

}  // namespace sbs::units

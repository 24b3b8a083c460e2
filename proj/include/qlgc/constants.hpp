#pragma once

#include <numbers>

namespace qlgc::constants {

// CODATA 2018, SI units throughout.
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double epsilon0 = 8.8541878128e-12;    // F/m
inline constexpr double speed_of_light = 2.99792458e8;  // m/s

inline constexpr double pi = std::numbers::pi;

}  // namespace qlgc::constants

#pragma once

#include <Eigen/Core>

namespace rltbd {

// Planar target state, ordered (x, vx, y, vy): position [m], velocity [m/s].
// The sensor sits at the origin; x points east, y north.
using StateVector = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;

inline constexpr int kPosX = 0;
inline constexpr int kVelX = 1;
inline constexpr int kPosY = 2;
inline constexpr int kVelY = 3;

inline constexpr int kStateDim = 4;

}  // namespace rltbd

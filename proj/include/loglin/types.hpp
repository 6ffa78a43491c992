#pragma once

#include <Eigen/Dense>

namespace loglin {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using VecX = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using MatX = Eigen::MatrixXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

} // namespace loglin

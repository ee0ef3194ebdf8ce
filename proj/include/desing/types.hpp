#pragma once

#include <complex>

#include <Eigen/Dense>

namespace desing {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Values and first/second partials of a two-parameter map into R^N.
template <int N>
struct Jet {
  Eigen::Matrix<double, N, 1> p, pu, pv, puu, puv, pvv;
};
using Jet3 = Jet<3>;
using Jet4 = Jet<4>;

}  // namespace desing

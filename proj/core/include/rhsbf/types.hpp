#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace rhsbf {

using cplx = std::complex<double>;

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kJ{0.0, 1.0};

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace rhsbf

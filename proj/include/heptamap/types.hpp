#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace hepta {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2d;
using CMat2 = Eigen::Matrix2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// i^k for any integer k
inline cplx ipow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace hepta

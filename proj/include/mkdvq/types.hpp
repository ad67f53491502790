#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace mkdvq {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using RealFn = std::function<double(double)>;
using CplxFn = std::function<cplx(cplx)>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};

inline Mat2 identity2() { return Mat2::Identity(); }

inline Mat2 lower(cplx c) {
    Mat2 m;
    m << 1.0, 0.0, c, 1.0;
    return m;
}

inline Mat2 upper(cplx c) {
    Mat2 m;
    m << 1.0, c, 0.0, 1.0;
    return m;
}

inline Mat2 diag2(cplx a, cplx b) {
    Mat2 m;
    m << a, 0.0, 0.0, b;
    return m;
}

/// Max-entry norm, used for all matrix tolerances.
inline double maxabs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace mkdvq

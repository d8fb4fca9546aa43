#pragma once

// Quadrature for hyperelliptic integrands with inverse square-root endpoint
// singularities, and adaptive complex line integrals.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "heptamap/simd.hpp"
#include "heptamap/types.hpp"

namespace hepta::quad {

inline constexpr int kMinNodes = 16;
inline constexpr int kMaxNodes = 4096;

struct ChebResult {
    double value = 0.0;
    double error = 0.0;  // |I_2N - I_N| at termination
    int nodes = 0;
};

// int_a^b f(x) / sqrt((x-a)(b-x)) dx by Gauss-Chebyshev with node doubling
ChebResult cheb_singular_detail(const std::function<double(double)>& f, double a, double b,
                                double tol);
double cheb_singular(const std::function<double(double)>& f, double a, double b, double tol);

// Principal-branch product prod_s sqrt(x - x_s). Analytic in the open upper half
// plane; on the real axis it equals i^{#(x_s > x)} sqrt|prod|.
cplx yplus(std::span<const double> xs, cplx x);

// int poly(x)/y+(x) dx over (x_seg, x_seg+1), seg = 1..6, where seg 6 runs from x6
// through infinity to x1. xs are six increasing finite reals, poly ascending.
cplx segment_integral(const std::array<double, 6>& xs, std::span<const double> poly, int seg,
                      double tol, simd::Backend be = simd::active_backend());

// int_{x_s}^{x_end} poly(x)/y+(x) dx along the real axis, x_end inside an interval
// adjacent to x_s (the interval left of x1 or right of x6 extends to infinity).
cplx partial_integral(const std::array<double, 6>& xs, std::span<const double> poly, int s,
                      double x_end, double tol);

struct LineOptions {
    double tol = 1e-12;
    bool singular_start = false;  // apply z = p + (q-p) t^2 on the first piece
    bool singular_end = false;    // same at the last piece
    int max_depth = 18;
};

// polyline from x1 to z in the closed upper half plane: up, across at a height of at
// least half the branch-point span, then down, so it stays away from the real axis
std::vector<cplx> arch_path(std::span<const double> xs, cplx z);

// adaptive Gauss-Kronrod integral of f along a polyline
cplx line_integral(const std::function<cplx(cplx)>& f, std::span<const cplx> path,
                   const LineOptions& opt = {});

}  // namespace hepta::quad

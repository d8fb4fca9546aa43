#pragma once

// Quadrature references for the theta pipeline. Nothing here evaluates theta
// functions except as comparison targets.

#include <array>
#include <span>

#include "heptamap/curve.hpp"
#include "heptamap/mapper.hpp"

namespace hepta::oracle {

// marked chart z = 1/(x0 - x) of the Rosenhain curve of the parameters; x0 -> +inf
Curve curve_from_params(const MapParams& p, double tol = 1e-14);

// H1..H5 from dw = (z - z_alpha)(z - z_beta) dz / y+ between consecutive branch points
std::array<double, 5> sides_by_quadrature(const Curve& c, int alpha, int beta, double tol = 1e-12);

// i pi + int dw along a polyline that starts at x1 and stays in the closed upper half plane
cplx cs_by_quadrature(const Curve& c, int alpha, int beta, std::span<const cplx> path,
                      double tol = 1e-12);
// straight path from x1
cplx cs_by_quadrature(const Curve& c, int alpha, int beta, cplx z, double tol = 1e-12);

// Abel-Jacobi image on the upper sheet, by quadrature in the chart of c
CVec2 aj_by_quadrature(const Curve& c, cplx z, double tol = 1e-13);

// int_{x_s}^{x_s+1} g(x) / y+(x) dx for a finite segment and smooth g
cplx segment_integral_fn(const std::array<double, 6>& xs, const std::function<double(double)>& g,
                         int seg, double tol);

struct ThirdKindResult {
    cplx quadrature;      // v_rq(p) - v_rq(p_ref) from the a-normalized kernel
    cplx theta;           // log theta[e] quotient difference
    double residual = 0;  // |quadrature - theta| modulo 2 pi i
    double antisymmetry = 0;
    std::array<double, 2> bilinear{};  // |int_{b_j} dv_rq - 2 pi i (u(r) - u(q))_j|
};

// r, q on the lower sheet and p, p_ref on the upper sheet, all real and left of x1
ThirdKindResult third_kind_check(const Curve& c, const SurfacePoint& r, const SurfacePoint& q,
                                 const SurfacePoint& p, const SurfacePoint& p_ref,
                                 double tol = 1e-12);

}  // namespace hepta::oracle

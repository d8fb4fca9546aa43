#pragma once

// The genus-2 curve y^2 = prod (x - x_s) with six real branch points.
//
// Conventions (fixed here once; everything else follows):
//  * H+ is the upper half plane on the sheet y+(x) = prod sqrt(x - x_s).
//  * a_s are the closed lifts of [x2,x3], [x4,x5]; du_j is normalized so that
//    2 int_{x2}^{x3} du = e1 and 2 int_{x4}^{x5} du = e2 on y+.
//  * Pi = i Omega with Omega_1j = 2i int_{x1}^{x2} du_j, Omega_2j = -2i int_{x5}^{x6} du_j.

#include <array>
#include <optional>
#include <string>

#include "heptamap/theta.hpp"
#include "heptamap/types.hpp"

namespace hepta {

// orientation-preserving real Moebius map x -> (a x + b)/(c x + d), ad - bc > 0
struct Mobius {
    double a = 1, b = 0, c = 0, d = 1;

    double operator()(double x) const;  // extended reals, +inf stands for the point at infinity
    cplx operator()(cplx z) const;
    Mobius inverse() const;
    Mobius then(const Mobius& next) const;  // next o this
    // the map sending (p, q, r) to (0, 1, inf); any argument may be +inf
    static Mobius from_three(double p, double q, double r);
};

struct Curve {
    std::string chart = "finite";
    std::array<double, 6> x{};   // cyclically increasing; at most one +inf
    std::optional<double> x0;    // marked point on the arc (x6, x1), may be +inf
};

// validates cyclic order; throws InvalidCurve
Curve make_curve(const std::array<double, 6>& x, std::optional<double> x0 = std::nullopt,
                 std::string chart = "finite");
bool all_finite(const Curve& c);
Curve apply_mobius(const Curve& c, const Mobius& m, std::string chart);
Curve to_marked_chart(const Curve& c);
// moves a third-arc point to infinity when a branch point sits at infinity
Curve to_finite_chart(const Curve& c);
// x1 -> 0, x2 -> 1, x6 -> inf
Mobius rosenhain_map(const Curve& c);

struct PeriodData {
    Mat2 omega;
    Mat2 du;  // du_j = (du(0,j) x + du(1,j)) dx / y+
    std::array<IntChar, 6> table;
    std::array<int, 2> b_sign{1, 1};  // orientation flips applied to b1, b2
};

Mat2 normalize_differentials(const Curve& c, double tol = 1e-14);
PeriodData period_matrix(const Curve& c, double tol = 1e-14);

enum class Sheet { Upper, Lower };  // Upper: y = y+(x), i.e. H+ for Im x > 0

struct SurfacePoint {
    cplx x;
    Sheet sheet = Sheet::Upper;
};

// integral of du from p1; branch points return the boundary half-period of H+
CVec2 aj_point(const Curve& c, const PeriodData& pd, const SurfacePoint& p, double tol = 1e-13);
// AJ image of branch point k by quadrature along the boundary of H+ (no table lookup)
CVec2 aj_branch_quadrature(const Curve& c, const PeriodData& pd, int k, double tol = 1e-14);

IntChar half_period_char(int k);
// (Pi e + e')/2 for the table characteristic
CVec2 half_period(int k, const Mat2& omega);
// representative in the closure of the H+ tile
CVec2 boundary_half_period(int k, const Mat2& omega);

// reduce characteristics into (-1,1]
CVec2 reduce_mod_lattice(const CVec2& u, const Mat2& omega);
// distance from u - v to the nearest lattice point Pi m + m'
double lattice_distance(const CVec2& u, const CVec2& v, const Mat2& omega);

// Rosenhain branch points (x3, x4, x5) in the chart x1 = 0, x2 = 1, x6 = inf
std::array<double, 3> rosenhain(const Mat2& omega, double tol = 1e-14);
// the values of 1 - x_k from the second normalization
std::array<double, 3> rosenhain_complement(const Mat2& omega, double tol = 1e-14);

struct Norm {
    int s = 1, j = 2, l = 6, k = 3;
};

// Degree-2 projection of the theta divisor to the sphere, normalized so that
// p_s -> 0, p_j -> 1, p_l -> inf.
class Projection {
public:
    Projection(const Mat2& omega, Norm norm, double tol = 1e-14);

    cplx operator()(const CVec2& u) const;
    // value and gradient of x(u)
    cplx eval(const CVec2& u, CVec2* grad) const;
    double constant() const { return kappa_; }
    const Norm& norm() const { return norm_; }

private:
    RiemannMatrix rm_;
    Norm norm_;
    IntChar num_, den_;
    double kappa_;
    double tol_;
};

cplx project_to_sphere(const Mat2& omega, const CVec2& u, Norm norm, double tol = 1e-14);

}  // namespace hepta

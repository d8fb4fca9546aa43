#include "heptamap/oracle.hpp"

#include <cmath>
#include <limits>

#include "heptamap/error.hpp"
#include "heptamap/quad.hpp"

namespace hepta::oracle {

namespace {

std::array<double, 6> finite_points(const Curve& c) {
    if (!all_finite(c)) throw Error(ErrorCode::InvalidCurve, "oracle needs a finite chart");
    std::array<double, 6> xs = c.x;
    for (int k = 0; k < 5; ++k)
        if (!(xs[k] < xs[k + 1])) throw Error(ErrorCode::InvalidCurve, "oracle needs x1 < ... < x6");
    return xs;
}

// evaluates twice, the second time at half the tolerance, and requires agreement
template <class F>
auto checked(F&& f, double tol) {
    const auto a = f(tol);
    const auto b = f(0.5 * tol);
    const double scale = std::max(1.0, std::abs(b));
    if (!(std::abs(a - b) <= 10 * tol * scale))
        throw Error(ErrorCode::NoConvergence, "quadrature refinement disagrees");
    return b;
}

std::array<double, 3> dw_poly(const std::array<double, 6>& xs, int alpha, int beta) {
    if (!(1 <= alpha && alpha < beta && beta <= 6)) throw Error(ErrorCode::BadLabel, "alpha, beta");
    const double a = xs[alpha - 1], b = xs[beta - 1];
    return {a * b, -(a + b), 1.0};
}

}  // namespace

Curve curve_from_params(const MapParams& p, double tol) {
    const auto r = rosenhain(p.omega, tol);
    const double x0 = project_to_sphere(p.omega, p.u0.cast<cplx>(), Norm{}, tol).real();
    const Curve ros = make_curve({0.0, 1.0, r[0], r[1], r[2], std::numeric_limits<double>::infinity()},
                                 x0, "rosenhain");
    return to_marked_chart(ros);
}

std::array<double, 5> sides_by_quadrature(const Curve& c, int alpha, int beta, double tol) {
    const auto xs = finite_points(c);
    const auto poly = dw_poly(xs, alpha, beta);
    std::array<double, 5> H{};
    for (int s = 1; s <= 5; ++s) {
        const cplx I = checked([&](double t) { return quad::segment_integral(xs, poly, s, t); }, tol);
        // i^s H_s = w_s - w_{s+1}
        H[s - 1] = (-I / ipow(s)).real();
    }
    return H;
}

cplx cs_by_quadrature(const Curve& c, int alpha, int beta, std::span<const cplx> path, double tol) {
    const auto xs = finite_points(c);
    const auto poly = dw_poly(xs, alpha, beta);
    if (path.size() < 2 || path.front() != cplx(xs[0], 0.0))
        throw Error(ErrorCode::BadSegment, "path must start at x1");
    for (cplx z : path)
        if (z.imag() < 0) throw Error(ErrorCode::PathThroughSingularity, "path leaves the upper half plane");
    bool end_at_branch = false;
    for (double x : xs) end_at_branch = end_at_branch || path.back() == cplx(x, 0.0);
    auto f = [&](cplx z) { return (poly[0] + z * (poly[1] + z * poly[2])) / quad::yplus(xs, z); };
    const cplx I = checked(
        [&](double t) {
            quad::LineOptions lo;
            lo.tol = t;
            lo.singular_start = true;
            lo.singular_end = end_at_branch;
            return quad::line_integral(f, path, lo);
        },
        tol);
    return cplx(0.0, kPi) + I;
}

cplx cs_by_quadrature(const Curve& c, int alpha, int beta, cplx z, double tol) {
    const auto path = quad::arch_path(finite_points(c), z);
    return cs_by_quadrature(c, alpha, beta, path, tol);
}

CVec2 aj_by_quadrature(const Curve& c, cplx z, double tol) {
    const PeriodData pd = period_matrix(c, tol);
    return aj_point(c, pd, SurfacePoint{z, Sheet::Upper}, tol);
}

cplx segment_integral_fn(const std::array<double, 6>& xs, const std::function<double(double)>& g,
                         int seg, double tol) {
    if (seg < 1 || seg > 5) throw Error(ErrorCode::BadSegment, "finite segment expected");
    const double a = xs[seg - 1], b = xs[seg];
    auto f = [&](double x) {
        double rest = 1;
        for (int j = 0; j < 6; ++j)
            if (j != seg - 1 && j != seg) rest *= x - xs[j];
        return g(x) / std::sqrt(std::fabs(rest));
    };
    return quad::cheb_singular(f, a, b, tol) / ipow(6 - seg);
}

ThirdKindResult third_kind_check(const Curve& c, const SurfacePoint& r, const SurfacePoint& q,
                                 const SurfacePoint& p, const SurfacePoint& p_ref, double tol) {
    const auto xs = finite_points(c);
    for (const SurfacePoint* s : {&r, &q, &p, &p_ref})
        if (s->x.imag() != 0.0 || !(s->x.real() < xs[0]))
            throw Error(ErrorCode::BadSegment, "third-kind check needs real points left of x1");
    if (r.sheet != Sheet::Lower || q.sheet != Sheet::Lower || p.sheet != Sheet::Upper ||
        p_ref.sheet != Sheet::Upper)
        throw Error(ErrorCode::BadSegment, "poles on the lower sheet, endpoints on the upper sheet");
    const double xr = r.x.real(), xq = q.x.real();
    if (xr == xq) throw Error(ErrorCode::BadSegment, "r and q coincide");
    const double yr = -quad::yplus(xs, xr).real(), yq = -quad::yplus(xs, xq).real();
    const PeriodData pd = period_matrix(c, tol);
    const Mat2& om = pd.omega;

    // kernel (1/2)[(y + y_r)/(x - x_r) - (y + y_q)/(x - x_q)] dx / y, odd part y-coefficient g
    auto g = [&](double x) { return 0.5 * (yr / (x - xr) - yq / (x - xq)); };
    Vec2 A;
    for (int k = 0; k < 2; ++k) {
        const int seg = k == 0 ? 2 : 4;
        A[k] = (2.0 * checked([&](double t) { return segment_integral_fn(xs, g, seg, t); }, tol)).real();
    }
    auto kernel = [&](cplx x) {
        const cplx y = quad::yplus(xs, x);
        return 0.5 * ((y + yr) / (x - xr) - (y + yq) / (x - xq)) / y;
    };
    const std::array<cplx, 2> path{p_ref.x, p.x};
    const cplx raw = checked(
        [&](double t) {
            quad::LineOptions lo;
            lo.tol = t;
            return quad::line_integral(kernel, path, lo);
        },
        tol);
    const CVec2 up = aj_point(c, pd, p, tol), uref = aj_point(c, pd, p_ref, tol);
    const CVec2 ur = aj_point(c, pd, r, tol), uq = aj_point(c, pd, q, tol);
    ThirdKindResult res;
    res.quadrature = raw - (A[0] * (up[0] - uref[0]) + A[1] * (up[1] - uref[1]));

    // odd characteristic with the best conditioned quotient
    const RiemannMatrix rm = RiemannMatrix::from_omega(om);
    double best = -1;
    for (const IntChar& e : all_chars()) {
        if (char_parity(e) != Parity::Odd) continue;
        const cplx a = theta_char(e, up - ur, rm), b = theta_char(e, up - uq, rm);
        const cplx a0 = theta_char(e, uref - ur, rm), b0 = theta_char(e, uref - uq, rm);
        const double qual = std::min({std::abs(a), std::abs(b), std::abs(a0), std::abs(b0)});
        if (qual > best) {
            best = qual;
            res.theta = std::log(a / b) - std::log(a0 / b0);
        }
    }
    auto mod2pi = [](cplx d) {
        return std::abs(d - cplx(0, 2 * kPi * std::round(d.imag() / (2 * kPi))));
    };
    res.residual = mod2pi(res.quadrature - res.theta);

    // swapping r and q negates the normalized kernel
    auto kernel_swapped = [&](cplx x) { return -kernel(x); };
    quad::LineOptions lo;
    lo.tol = tol;
    const cplx sw = quad::line_integral(kernel_swapped, path, lo) +
                    (A[0] * (up[0] - uref[0]) + A[1] * (up[1] - uref[1]));
    res.antisymmetry = std::abs(sw + res.quadrature);

    // b-periods: b1 = -2 int_{x1}^{x2}, b2 = 2 int_{x5}^{x6} of the odd part
    for (int j = 0; j < 2; ++j) {
        const int seg = j == 0 ? 1 : 5;
        const double sgn = (j == 0 ? -2.0 : 2.0) * pd.b_sign[j];
        const cplx bk = sgn * checked([&](double t) { return segment_integral_fn(xs, g, seg, t); }, tol);
        const cplx bn = bk - kI * (A[0] * om(j, 0) + A[1] * om(j, 1));
        const cplx target = 2.0 * kPi * kI * (ur[j] - uq[j]);
        res.bilinear[j] = mod2pi(bn - target);
    }
    return res;
}

}  // namespace hepta::oracle

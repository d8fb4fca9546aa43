#include "heptamap/curve.hpp"

#include <cmath>
#include <limits>

#include "heptamap/error.hpp"
#include "heptamap/quad.hpp"

namespace hepta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// boundary representatives (eps, eps') of u(p_k) in the closure of H+
constexpr int kBoundary[6][4] = {
    {0, 0, 0, 0}, {-1, 0, 0, 0}, {-1, 0, 1, 0}, {0, -1, 1, 0}, {0, -1, 1, 1}, {0, 0, 1, 1},
};

int cyclic_descents(const double* v, int n) {
    int d = 0;
    for (int k = 0; k < n; ++k)
        if (!(v[k] < v[(k + 1) % n])) ++d;
    return d;
}

double reduce_char(double v) { return v - 2.0 * std::ceil((v - 1.0) / 2.0); }

std::array<double, 6> sorted_finite(const Curve& c) {
    for (int k = 0; k < 5; ++k)
        if (!(c.x[k] < c.x[k + 1]) || !std::isfinite(c.x[k]) || !std::isfinite(c.x[k + 1]))
            throw Error(ErrorCode::InvalidCurve,
                        "chart must have x1 < ... < x6 all finite; use to_finite_chart");
    return c.x;
}

double real_of(cplx v, double tol, const char* what) {
    if (std::fabs(v.imag()) > tol * std::max(1.0, std::fabs(v.real())))
        throw Error(ErrorCode::SignCheckFailed, std::string(what) + " not real");
    return v.real();
}

cplx theta_sq_const(const IntChar& c, const RiemannMatrix& rm, double tol, double* scale) {
    ThetaOptions o;
    o.tol = tol;
    const ThetaEval e = theta_eval(RealChar(c), CVec2::Zero(), rm, o, false);
    if (scale) *scale = e.max_term;
    return e.value * e.value;
}

}  // namespace

double Mobius::operator()(double x) const {
    if (std::isinf(x)) return c == 0 ? kInf : a / c;
    const double den = c * x + d;
    if (den == 0) return kInf;
    return (a * x + b) / den;
}

cplx Mobius::operator()(cplx z) const { return (a * z + b) / (c * z + d); }

Mobius Mobius::inverse() const { return {d, -b, -c, a}; }

Mobius Mobius::then(const Mobius& n) const {
    return {n.a * a + n.b * c, n.a * b + n.b * d, n.c * a + n.d * c, n.c * b + n.d * d};
}

Mobius Mobius::from_three(double p, double q, double r) {
    if (std::isinf(p)) return {0, q - r, 1, -r};
    if (std::isinf(q)) return {1, -p, 1, -r};
    if (std::isinf(r)) return {1, -p, 0, q - p};
    return {q - r, -p * (q - r), q - p, -r * (q - p)};
}

Curve make_curve(const std::array<double, 6>& x, std::optional<double> x0, std::string chart) {
    int infs = 0;
    for (double v : x) {
        if (std::isnan(v) || v == -kInf) throw Error(ErrorCode::InvalidCurve, "bad branch point");
        infs += std::isinf(v);
    }
    if (infs > 1) throw Error(ErrorCode::InvalidCurve, "more than one branch point at infinity");
    if (cyclic_descents(x.data(), 6) != 1)
        throw Error(ErrorCode::InvalidCurve, "branch points not cyclically ordered");
    if (x0) {
        if (std::isnan(*x0) || *x0 == -kInf || (std::isinf(*x0) && infs))
            throw Error(ErrorCode::InvalidCurve, "bad marked point");
        const double seven[7] = {*x0, x[0], x[1], x[2], x[3], x[4], x[5]};
        if (cyclic_descents(seven, 7) != 1)
            throw Error(ErrorCode::InvalidCurve, "marked point not on the arc (x6, x1)");
    }
    return Curve{std::move(chart), x, x0};
}

bool all_finite(const Curve& c) {
    for (double v : c.x)
        if (std::isinf(v)) return false;
    return true;
}

Curve apply_mobius(const Curve& c, const Mobius& m, std::string chart) {
    std::array<double, 6> y;
    for (int k = 0; k < 6; ++k) y[k] = m(c.x[k]);
    std::optional<double> y0;
    if (c.x0) y0 = m(*c.x0);
    return make_curve(y, y0, std::move(chart));
}

Curve to_marked_chart(const Curve& c) {
    if (!c.x0) throw Error(ErrorCode::InvalidCurve, "curve has no marked point");
    if (std::isinf(*c.x0)) return c;
    return apply_mobius(c, Mobius{0, 1, -1, *c.x0}, "marked");
}

Curve to_finite_chart(const Curve& c) {
    bool sorted = all_finite(c);
    for (int k = 0; k < 5 && sorted; ++k) sorted = c.x[k] < c.x[k + 1];
    if (sorted) return c;
    const double x1 = c.x[0], x6 = c.x[5];
    double q;
    if (std::isinf(x6)) q = x1 - 1.0;
    else if (std::isinf(x1)) q = x6 + 1.0;
    else q = 0.5 * (x6 + x1);
    if (c.x0 && std::isfinite(*c.x0) && *c.x0 == q) q = 0.5 * (q + (std::isinf(x6) ? x1 : x6));
    return apply_mobius(c, Mobius{0, 1, -1, q}, "finite");
}

Mobius rosenhain_map(const Curve& c) { return Mobius::from_three(c.x[0], c.x[1], c.x[5]); }

Mat2 normalize_differentials(const Curve& c, double tol) {
    const auto xs = sorted_finite(c);
    const std::array<double, 2> px{0.0, 1.0}, p1{1.0};
    Mat2 A;
    for (int s = 0; s < 2; ++s) {
        const int seg = s == 0 ? 2 : 4;
        A(s, 0) = 2 * quad::segment_integral(xs, px, seg, tol).real();
        A(s, 1) = 2 * quad::segment_integral(xs, p1, seg, tol).real();
    }
    const double det = A.determinant();
    if (!(std::fabs(det) > 1e-14 * A.cwiseAbs().maxCoeff() * A.cwiseAbs().maxCoeff()))
        throw Error(ErrorCode::SingularSystem, "a-period matrix is singular");
    return A.inverse();
}

PeriodData period_matrix(const Curve& c, double tol) {
    const auto xs = sorted_finite(c);
    PeriodData pd;
    pd.du = normalize_differentials(c, tol);
    const std::array<double, 2> px{0.0, 1.0}, p1{1.0};
    const cplx b1x = quad::segment_integral(xs, px, 1, tol);
    const cplx b11 = quad::segment_integral(xs, p1, 1, tol);
    const cplx b2x = quad::segment_integral(xs, px, 5, tol);
    const cplx b21 = quad::segment_integral(xs, p1, 5, tol);
    CMat2 om;
    for (int j = 0; j < 2; ++j) {
        om(0, j) = 2.0 * kI * (b1x * pd.du(0, j) + b11 * pd.du(1, j));
        om(1, j) = -2.0 * kI * (b2x * pd.du(0, j) + b21 * pd.du(1, j));
    }
    Mat2 omega = om.real();
    for (int s = 0; s < 2; ++s) {
        if (omega(s, s) < 0) {
            omega.row(s) *= -1.0;
            pd.b_sign[s] = -1;
        }
    }
    if (std::fabs(omega(0, 1) - omega(1, 0)) > 1e-8 * omega.cwiseAbs().maxCoeff())
        throw Error(ErrorCode::ConeViolation, "period matrix not symmetric");
    const double o12 = 0.5 * (omega(0, 1) + omega(1, 0));
    omega(0, 1) = omega(1, 0) = o12;
    if (!(o12 > 0 && o12 < std::min(omega(0, 0), omega(1, 1))))
        throw Error(ErrorCode::ConeViolation, "period matrix outside the cone");
    pd.omega = omega;
    for (int k = 0; k < 6; ++k) pd.table[k] = half_period_char(k + 1);
    return pd;
}

IntChar half_period_char(int k) { return char_from_indices({k}); }

CVec2 half_period(int k, const Mat2& omega) { return point_of(RealChar(half_period_char(k)), omega); }

CVec2 boundary_half_period(int k, const Mat2& omega) {
    if (k < 1 || k > 6) throw Error(ErrorCode::BadLabel, "branch label " + std::to_string(k));
    const int* b = kBoundary[k - 1];
    return point_of(RealChar(Vec2(b[0], b[1]), Vec2(b[2], b[3])), omega);
}

CVec2 reduce_mod_lattice(const CVec2& u, const Mat2& omega) {
    RealChar rc = char_of(u, omega);
    for (int k = 0; k < 2; ++k) {
        rc.eps[k] = reduce_char(rc.eps[k]);
        rc.epsp[k] = reduce_char(rc.epsp[k]);
    }
    return point_of(rc, omega);
}

double lattice_distance(const CVec2& u, const CVec2& v, const Mat2& omega) {
    RealChar rc = char_of(u - v, omega);
    for (int k = 0; k < 2; ++k) {
        rc.eps[k] -= 2.0 * std::round(rc.eps[k] / 2.0);
        rc.epsp[k] -= 2.0 * std::round(rc.epsp[k] / 2.0);
    }
    return point_of(rc, omega).norm();
}

CVec2 aj_point(const Curve& c, const PeriodData& pd, const SurfacePoint& p, double tol) {
    const auto xs = sorted_finite(c);
    const double sgn = p.sheet == Sheet::Upper ? 1.0 : -1.0;
    auto combine = [&](cplx ix, cplx i1) {
        CVec2 u;
        for (int j = 0; j < 2; ++j) u[j] = ix * pd.du(0, j) + i1 * pd.du(1, j);
        return u;
    };
    if (p.x.imag() == 0.0) {
        const double x = p.x.real();
        for (int k = 0; k < 6; ++k)
            if (x == xs[k]) return boundary_half_period(k + 1, pd.omega);
        const std::array<double, 2> px{0.0, 1.0}, p1{1.0};
        cplx ix = 0, i1 = 0;
        int s = 1;
        if (x > xs[0]) {
            while (s < 6 && x > xs[s]) {
                ix += quad::segment_integral(xs, px, s, tol);
                i1 += quad::segment_integral(xs, p1, s, tol);
                ++s;
            }
        }
        ix += quad::partial_integral(xs, px, s, x, tol);
        i1 += quad::partial_integral(xs, p1, s, x, tol);
        return sgn * combine(ix, i1);
    }
    const bool lower_half = p.x.imag() < 0;
    const cplx x = lower_half ? std::conj(p.x) : p.x;
    const auto path = quad::arch_path(xs, x);
    quad::LineOptions lo;
    lo.tol = tol;
    lo.singular_start = true;
    const cplx ix = quad::line_integral([&](cplx z) { return z / quad::yplus(xs, z); }, path, lo);
    const cplx i1 = quad::line_integral([&](cplx z) { return 1.0 / quad::yplus(xs, z); }, path, lo);
    CVec2 u = sgn * combine(ix, i1);
    if (lower_half) u = u.conjugate();
    return u;
}

CVec2 aj_branch_quadrature(const Curve& c, const PeriodData& pd, int k, double tol) {
    if (k < 1 || k > 6) throw Error(ErrorCode::BadLabel, "branch label " + std::to_string(k));
    const auto xs = sorted_finite(c);
    const std::array<double, 2> px{0.0, 1.0}, p1{1.0};
    cplx ix = 0, i1 = 0;
    for (int s = 1; s < k; ++s) {
        ix += quad::segment_integral(xs, px, s, tol);
        i1 += quad::segment_integral(xs, p1, s, tol);
    }
    CVec2 u;
    for (int j = 0; j < 2; ++j) u[j] = ix * pd.du(0, j) + i1 * pd.du(1, j);
    return u;
}

std::array<double, 3> rosenhain(const Mat2& omega, double tol) {
    const RiemannMatrix rm = RiemannMatrix::from_omega(omega);
    double scale = 0;
    auto T2 = [&](const char* r1, const char* r2) {
        const cplx v = theta_sq_const(char_from_rows(r1, r2), rm, tol, &scale);
        if (std::abs(v) < 1e-24 * scale * scale)
            throw Error(ErrorCode::HumbertDegenerate, "even theta constant vanishes");
        return v;
    };
    const cplx a = T2("00", "00"), b = T2("00", "01"), cc = T2("01", "00"), d = T2("01", "01");
    const cplx e = T2("10", "10"), f = T2("11", "11");
    return {real_of(a * b / (cc * d), 1e-9, "x3"), real_of(b * e / (cc * f), 1e-9, "x4"),
            real_of(a * e / (f * d), 1e-9, "x5")};
}

std::array<double, 3> rosenhain_complement(const Mat2& omega, double tol) {
    const RiemannMatrix rm = RiemannMatrix::from_omega(omega);
    auto T2 = [&](const char* r1, const char* r2) {
        return theta_sq_const(char_from_rows(r1, r2), rm, tol, nullptr);
    };
    const cplx cc = T2("01", "00"), d = T2("01", "01"), f = T2("11", "11");
    const cplx g = T2("10", "00"), h = T2("10", "01"), k = T2("00", "10");
    return {real_of(-g * h / (cc * d), 1e-9, "1-x3"), real_of(-k * h / (cc * f), 1e-9, "1-x4"),
            real_of(-k * g / (f * d), 1e-9, "1-x5")};
}

Projection::Projection(const Mat2& omega, Norm norm, double tol)
    : rm_(RiemannMatrix::from_omega(omega)), norm_(norm), tol_(tol) {
    const int s = norm.s, j = norm.j, l = norm.l, k = norm.k;
    for (int v : {s, j, l, k})
        if (v < 1 || v > 6) throw Error(ErrorCode::BadLabel, "normalization label");
    if (s == j || s == l || j == l || k == s || k == j || k == l)
        throw Error(ErrorCode::BadLabel, "normalization labels must be distinct");
    num_ = char_from_indices({s, k, 3, 5});
    den_ = char_from_indices({l, k, 3, 5});
    const IntChar cj = half_period_char(j), cs = half_period_char(s), cl = half_period_char(l);
    const int par = (cj.eps[0] * ((cs.epsp[0] + cl.epsp[0]) % 2) +
                     cj.eps[1] * ((cs.epsp[1] + cl.epsp[1]) % 2)) % 2;
    const cplx top = theta_sq_const(char_from_indices({l, k, j, 3, 5}), rm_, tol, nullptr);
    const cplx bot = theta_sq_const(char_from_indices({s, k, j, 3, 5}), rm_, tol, nullptr);
    if (std::abs(bot) == 0.0) throw Error(ErrorCode::DenominatorZero, "normalizing constant");
    kappa_ = (par ? -1.0 : 1.0) * real_of(top / bot, 1e-9, "projection constant");

    // p_j must land on 1 and a further branch point on its arc (p_k is a common
    // zero of numerator and denominator, so the check uses a label outside s,j,l,k)
    const cplx xj = (*this)(half_period(j, omega));
    if (std::abs(xj - 1.0) > 1e-6) throw Error(ErrorCode::SignCheckFailed, "x(p_j) != 1");
    int m = 1;
    while (m == s || m == j || m == l || m == k) ++m;
    const cplx xm = (*this)(half_period(m, omega));
    auto fwd = [](int a, int b, int m) {  // m strictly inside the forward arc a -> b
        for (int t = a % 6 + 1; t != b; t = t % 6 + 1)
            if (t == m) return true;
        return false;
    };
    auto on_arc = [&](int a, int b, int c, int m) {
        return fwd(a, b, c) ? fwd(b, a, m) : fwd(a, b, m);
    };
    double lo = -kInf, hi = 0;
    if (on_arc(s, j, l, m)) lo = 0, hi = 1;
    else if (on_arc(j, l, s, m)) lo = 1, hi = kInf;
    if (std::fabs(xm.imag()) > 1e-6 * (1 + std::abs(xm)) || !(xm.real() > lo && xm.real() < hi))
        throw Error(ErrorCode::SignCheckFailed, "branch point image off its arc");
}

cplx Projection::eval(const CVec2& u, CVec2* grad) const {
    ThetaOptions o;
    o.tol = tol_;
    const ThetaEval n = theta_eval(RealChar(num_), u, rm_, o, grad != nullptr);
    const ThetaEval d = theta_eval(RealChar(den_), u, rm_, o, grad != nullptr);
    if (std::abs(d.value) <= 1e-14 * d.max_term)
        throw Error(ErrorCode::DenominatorZero, "point maps to infinity");
    const cplx r = n.value / d.value;
    if (grad) *grad = 2.0 * kappa_ * r * (n.grad - r * d.grad) / d.value;
    return kappa_ * r * r;
}

cplx Projection::operator()(const CVec2& u) const { return eval(u, nullptr); }

cplx project_to_sphere(const Mat2& omega, const CVec2& u, Norm norm, double tol) {
    return Projection(omega, norm, tol)(u);
}

}  // namespace hepta

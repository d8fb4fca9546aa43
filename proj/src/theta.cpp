#include "heptamap/theta.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "heptamap/error.hpp"

namespace hepta {

namespace {

// half-period characteristics of the branch points p1..p6
constexpr std::array<IntChar, 6> kTable = {{
    {{0, 0}, {0, 0}},
    {{1, 0}, {0, 0}},
    {{1, 0}, {1, 0}},
    {{0, 1}, {1, 0}},
    {{0, 1}, {1, 1}},
    {{0, 0}, {1, 1}},
}};

bool is_integral(const Vec2& v) {
    return v[0] == std::round(v[0]) && v[1] == std::round(v[1]);
}

struct TermBuffers {
    std::vector<double> re, im, a, b;
    void clear() {
        re.clear();
        im.clear();
        a.clear();
        b.clear();
    }
};

// Lattice points n = m + e/2 with lo2 < (n-c)^T Y (n-c) <= hi2.
void collect(const RealChar& ch, const CVec2& v, const RiemannMatrix& rm, const Vec2& c,
             double lo2, double hi2, TermBuffers& buf) {
    const Mat2& Y = rm.y();
    const Mat2 X = rm.pi().real();
    const Vec2 vr = v.real();
    const double R = std::sqrt(hi2);
    const double w1 = R * std::sqrt(rm.y_inv()(0, 0));
    const double h1 = ch.eps[0] / 2, h2 = ch.eps[1] / 2;
    const long m1lo = static_cast<long>(std::ceil(c[0] - h1 - w1));
    const long m1hi = static_cast<long>(std::floor(c[0] - h1 + w1));
    for (long m1 = m1lo; m1 <= m1hi; ++m1) {
        const double n1 = m1 + h1;
        const double d1 = n1 - c[0];
        const double disc = Y(0, 1) * Y(0, 1) * d1 * d1 - Y(1, 1) * (Y(0, 0) * d1 * d1 - hi2);
        if (disc < 0) continue;
        const double sq = std::sqrt(disc);
        const double d2lo = (-Y(0, 1) * d1 - sq) / Y(1, 1);
        const double d2hi = (-Y(0, 1) * d1 + sq) / Y(1, 1);
        const long m2lo = static_cast<long>(std::ceil(c[1] + d2lo - h2));
        const long m2hi = static_cast<long>(std::floor(c[1] + d2hi - h2));
        for (long m2 = m2lo; m2 <= m2hi; ++m2) {
            const double n2 = m2 + h2;
            const double d2 = n2 - c[1];
            const double q = Y(0, 0) * d1 * d1 + 2 * Y(0, 1) * d1 * d2 + Y(1, 1) * d2 * d2;
            if (q <= lo2 || q > hi2) continue;
            buf.re.push_back(-kPi * q);
            buf.im.push_back(2 * kPi * (n1 * vr[0] + n2 * vr[1]) +
                             kPi * (X(0, 0) * n1 * n1 + 2 * X(0, 1) * n1 * n2 +
                                    X(1, 1) * n2 * n2));
            buf.a.push_back(n1);
            buf.b.push_back(n2);
        }
    }
}

// Gaussian tail bound relative to the largest possible term.
double tail_bound(double R, double rho, double sqrt_det) {
    const double a = R - 2 * rho;
    if (a <= 0) return 1e300;
    return (std::exp(-kPi * a * a) + kPi * rho * std::erfc(std::sqrt(kPi) * a)) / sqrt_det;
}

}  // namespace

Parity char_parity(const IntChar& c) {
    const int s = c.eps[0] * c.epsp[0] + c.eps[1] * c.epsp[1];
    return (s % 2 == 0) ? Parity::Even : Parity::Odd;
}

IntChar char_add(const IntChar& a, const IntChar& b) {
    IntChar r;
    for (int k = 0; k < 2; ++k) {
        r.eps[k] = (a.eps[k] + b.eps[k]) % 2;
        r.epsp[k] = (a.epsp[k] + b.epsp[k]) % 2;
    }
    return r;
}

IntChar char_from_indices(std::span<const int> labels) {
    IntChar r;
    for (int s : labels) {
        if (s < 1 || s > 6) throw Error(ErrorCode::BadLabel, "branch label " + std::to_string(s));
        r = char_add(r, kTable[s - 1]);
    }
    return r;
}

IntChar char_from_indices(std::initializer_list<int> labels) {
    return char_from_indices(std::span<const int>(labels.begin(), labels.size()));
}

IntChar char_from_rows(const char* row1, const char* row2) {
    IntChar r;
    r.eps = {row1[0] - '0', row2[0] - '0'};
    r.epsp = {row1[1] - '0', row2[1] - '0'};
    return r;
}

std::string to_string(const IntChar& c) {
    std::ostringstream os;
    os << '[' << c.eps[0] << c.epsp[0] << ';' << c.eps[1] << c.epsp[1] << ']';
    return os.str();
}

std::array<IntChar, 16> all_chars() {
    std::array<IntChar, 16> out;
    for (int k = 0; k < 16; ++k) {
        out[k].eps = {(k >> 3) & 1, (k >> 2) & 1};
        out[k].epsp = {(k >> 1) & 1, k & 1};
    }
    return out;
}

RiemannMatrix::RiemannMatrix(const CMat2& pi) : pi_(pi) {
    if (std::abs(pi(0, 1) - pi(1, 0)) > 1e-12 * (1 + pi.norm()))
        throw Error(ErrorCode::NonPositiveDefinite, "Riemann matrix not symmetric");
    pi_(1, 0) = pi_(0, 1);
    y_ = pi_.imag();
    if (!(y_(0, 0) > 0) || !(y_.determinant() > 0))
        throw Error(ErrorCode::NonPositiveDefinite, "imaginary part not positive definite");
    y_inv_ = y_.inverse();
}

RiemannMatrix RiemannMatrix::from_omega(const Mat2& omega) {
    return RiemannMatrix(CMat2(omega.cast<cplx>() * kI));
}

ThetaEval theta_eval(const RealChar& c, const CVec2& u, const RiemannMatrix& rm,
                     const ThetaOptions& opt, bool want_grad) {
    const CVec2 v = u + c.epsp.cast<cplx>() / 2.0;
    const Mat2& Y = rm.y();
    const Vec2 center = -rm.y_inv() * v.imag();
    const double shift = kPi * center.dot(Y * center);
    const double rho = 0.5 * std::sqrt(Y(0, 0) + Y(1, 1) + 2 * std::fabs(Y(0, 1)));
    const double sqrt_det = std::sqrt(Y.determinant());
    const double target = opt.tol * std::exp(-kPi * rho * rho);

    double R = 2 * rho + 0.5;
    while (tail_bound(R, rho, sqrt_det) > target) R += 0.125;
    const double span_scale = std::sqrt(std::max(rm.y_inv()(0, 0), rm.y_inv()(1, 1)));

    thread_local TermBuffers buf;
    for (;;) {
        if (R * span_scale > opt.max_radius)
            throw Error(ErrorCode::NoConvergence, "theta truncation radius exceeds cap");
        buf.clear();
        collect(c, v, rm, center, -1.0, R * R, buf);
        const std::size_t inner = buf.re.size();
        simd::ExpSum s = simd::exp_sum(opt.backend, buf.re.data(), buf.im.data(),
                                       want_grad ? buf.a.data() : nullptr,
                                       want_grad ? buf.b.data() : nullptr, inner);
        std::size_t total = inner;
        if (opt.verify) {
            const std::size_t before = buf.re.size();
            collect(c, v, rm, center, R * R, 4 * R * R, buf);
            const std::size_t n_shell = buf.re.size() - before;
            const simd::ExpSum sh = simd::exp_sum(
                opt.backend, buf.re.data() + before, buf.im.data() + before,
                want_grad ? buf.a.data() + before : nullptr,
                want_grad ? buf.b.data() + before : nullptr, n_shell);
            if (std::abs(sh.s0) > opt.tol * s.max_abs) {
                R *= 2;
                continue;
            }
            s.s0 += sh.s0;
            s.s1 += sh.s1;
            s.s2 += sh.s2;
            total += n_shell;
        }
        const double scale = std::exp(shift);
        ThetaEval out;
        out.value = s.s0 * scale;
        out.grad = CVec2(2 * kPi * kI * s.s1 * scale, 2 * kPi * kI * s.s2 * scale);
        out.max_term = s.max_abs * scale;
        out.terms = static_cast<int>(total);
        if (u.isZero(0.0) && is_integral(c.eps) && is_integral(c.epsp)) {
            const double par = c.eps.dot(c.epsp);
            if (std::fmod(std::fabs(par), 2.0) == 1.0) out.value = 0.0;
        }
        return out;
    }
}

cplx theta(const CVec2& u, const RiemannMatrix& pi, double tol) {
    ThetaOptions o;
    o.tol = tol;
    return theta_eval(RealChar{}, u, pi, o, false).value;
}

cplx theta_char(const RealChar& c, const CVec2& u, const RiemannMatrix& pi, double tol) {
    ThetaOptions o;
    o.tol = tol;
    return theta_eval(c, u, pi, o, false).value;
}

CVec2 theta_grad(const RealChar& c, const CVec2& u, const RiemannMatrix& pi, double tol) {
    ThetaOptions o;
    o.tol = tol;
    return theta_eval(c, u, pi, o, true).grad;
}

cplx theta_const(const IntChar& c, const RiemannMatrix& pi, double tol) {
    if (char_parity(c) == Parity::Odd) return 0.0;
    return theta_char(RealChar(c), CVec2::Zero(), pi, tol);
}

CVec2 point_of(const RealChar& c, const Mat2& omega) {
    const Vec2 im = omega * c.eps;
    return 0.5 * (kI * im.cast<cplx>() + c.epsp.cast<cplx>());
}

RealChar char_of(const CVec2& u, const Mat2& omega) {
    const Vec2 epsp = 2.0 * u.real();
    const Vec2 eps = omega.inverse() * (2.0 * u.imag());
    return {eps, epsp};
}

TileLabel tile_of(const CVec2& u, const Mat2& omega, double tol) {
    const RealChar rc = char_of(u, omega);
    TileLabel t;
    auto classify = [&](double v, int& sign) {
        double r = v - 2.0 * std::floor(v / 2.0);  // [0,2)
        if (r > 1.0) r -= 2.0;                       // (-1,1]
        sign = r > 0 ? 1 : -1;
        const double d = std::min({std::fabs(r), std::fabs(r - 1.0), std::fabs(r + 1.0)});
        if (d <= tol) t.boundary = true;
    };
    for (int k = 0; k < 2; ++k) {
        classify(rc.eps[k], t.sigma_eps[k]);
        classify(rc.epsp[k], t.sigma_epsp[k]);
    }
    return t;
}

}  // namespace hepta

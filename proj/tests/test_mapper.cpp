#include <doctest.h>

#include <cmath>
#include <random>

#include "heptamap/curve.hpp"
#include "heptamap/error.hpp"
#include "heptamap/heptagon.hpp"
#include "heptamap/mapper.hpp"
#include "heptamap/oracle.hpp"
#include "heptamap/quad.hpp"

using namespace hepta;

namespace {

Heptagon reference() {
    Heptagon h;
    h.H = {5.0, 2.0, 1.0, 1.0, kPi - 4.0};
    return h;
}

Mat2 omega0() {
    Mat2 om;
    om << 2.0, 0.5, 0.5, 1.5;
    return om;
}

const MapParams& reference_params() {
    static const MapParams p = solve_parameters(reference());
    return p;
}

const ConformalMap& reference_map() {
    static const ConformalMap m(reference_params());
    return m;
}

double cross_ratio_defect(const ConformalMap& m, cplx w, double h) {
    const cplx a = w, b = w + h, c = w + cplx(0.3, 0.8) * h, d = w + cplx(-0.6, 0.5) * h;
    auto cr = [](cplx p, cplx q, cplx r, cplx s) { return (p - r) * (q - s) / ((p - s) * (q - r)); };
    const cplx x = cr(m.to_halfplane(a), m.to_halfplane(b), m.to_halfplane(c), m.to_halfplane(d));
    return std::abs(x - cr(a, b, c, d));
}

}  // namespace

TEST_SUITE("mapper") {

TEST_CASE("reference heptagon solves to a small residual") {
    const MapParams& p = reference_params();
    CHECK(p.residual <= 1e-9);
    CHECK(equation_residuals(p, reference()).max() <= 1e-9);
    CHECK(p.omega(0, 1) > 0);
    CHECK(p.omega(0, 1) < std::min(p.omega(0, 0), p.omega(1, 1)));
    CHECK(p.u0[0] > 0);
    CHECK(p.u0[0] < 0.5);
    // side formulas
    CHECK(std::fabs(reference().H[1] - p.C[0] / 2) <= 1e-9);
    CHECK(std::fabs(reference().H[3] + p.C[1] / 2) <= 1e-9);
    const Heptagon back = heptagon_of(p);
    for (int s = 0; s < 5; ++s) CHECK(std::fabs(back.H[s] - reference().H[s]) <= 1e-9);
    CHECK(std::fabs(back.H[0] - back.H[2] + back.H[4] - kPi) <= 1e-9);
}

TEST_CASE("forward sides then solve is a fixed point for every class") {
    for (int a = 1; a <= 6; ++a)
        for (int b = a + 1; b <= 6; ++b) {
            CAPTURE(a);
            CAPTURE(b);
            const ForwardResult fr = forward_sides(omega0(), 0.2, a, b);
            REQUIRE(fr.violations.empty());
            const MapParams p = solve_parameters(fr.h);
            CHECK((p.omega - omega0()).norm() <= 1e-8);
            CHECK(std::fabs(p.u0[0] - 0.2) <= 1e-8);
            CHECK((p.C - fr.C).norm() <= 1e-8 * (1 + fr.C.norm()));
        }
}

TEST_CASE("uniqueness probe: perturbed starts reach the same solution") {
    const MapParams& ref = reference_params();
    std::mt19937_64 r(5);
    std::uniform_real_distribution<double> d(-0.25, 0.25);
    for (int t = 0; t < 4; ++t) {
        SolveOptions o;
        o.omega0(0, 0) *= 1 + d(r);
        o.omega0(1, 1) *= 1 + d(r);
        o.omega0(0, 1) = o.omega0(1, 0) = 0.5 * (1 + d(r));
        o.u1_0 = 0.2 + 0.4 * d(r);
        const MapParams p = solve_parameters(reference(), o);
        CHECK((p.omega - ref.omega).norm() <= 1e-8);
        CHECK((p.u0 - ref.u0).norm() <= 1e-8);
    }
}

TEST_CASE("second coordinate of u0 is the unique sign change") {
    const double u1 = 0.2;
    const double u2 = solve_u0_second(omega0(), u1);
    const RiemannMatrix rm = RiemannMatrix::from_omega(omega0());
    const IntChar k = char_from_indices({3, 5});
    const ThetaEval e = theta_eval(RealChar(k), CVec2(u1, u2), rm);
    CHECK(std::abs(e.value) <= 1e-11 * e.max_term);
    int changes = 0;
    double prev = theta_char(RealChar(k), CVec2(u1, 0.0), rm).real();
    for (int j = 1; j <= 64; ++j) {
        const double v = theta_char(RealChar(k), CVec2(u1, 0.5 * j / 64), rm).real();
        changes += (v > 0) != (prev > 0);
        prev = v;
    }
    CHECK(changes == 1);
    CHECK_THROWS_AS(forward_sides(omega0(), 0.7, 5, 6), Error);
}

TEST_CASE("marked point lies on the third oval and reproduces u0") {
    const MapParams& p = reference_params();
    const ConformalMap& m = reference_map();
    CHECK(m.x0_rosenhain() < 0);
    const auto x = m.rosenhain_points();
    const Curve ros = make_curve({0.0, 1.0, x[0], x[1], x[2], INFINITY}, m.x0_rosenhain());
    const Curve fin = to_finite_chart(ros);
    const PeriodData pd = period_matrix(fin);
    CHECK((pd.omega - p.omega).norm() <= 1e-9);
    const CVec2 u0 = p.u0.cast<cplx>();
    double best = INFINITY;
    for (Sheet s : {Sheet::Upper, Sheet::Lower}) {
        const CVec2 u = aj_point(fin, pd, {cplx(*fin.x0, 0.0), s});
        best = std::min({best, lattice_distance(u, u0, p.omega), lattice_distance(u, -u0, p.omega)});
    }
    CHECK(best <= 1e-8);
}

TEST_CASE("C equals the a-periods of the CS differential") {
    const MapParams& p = reference_params();
    const Curve c = oracle::curve_from_params(p);
    std::array<double, 6> zs;
    std::copy(c.x.begin(), c.x.end(), zs.begin());
    const double za = zs[p.alpha - 1], zb = zs[p.beta - 1];
    const std::array<double, 3> poly{za * zb, -(za + zb), 1.0};
    for (int k = 0; k < 2; ++k) {
        const cplx a = 2.0 * quad::segment_integral(zs, poly, 2 * k + 2, 1e-13);
        CHECK(std::fabs(a.real() - p.C[k]) <= 1e-8);
        CHECK(std::fabs(a.imag()) <= 1e-8);
    }
}

TEST_CASE("vertex images are the heptagon vertices") {
    const ConformalMap& m = reference_map();
    const auto v = vertices(reference());
    const auto img = m.vertex_images();
    for (int s = 0; s < 6; ++s) CHECK(std::abs(img[s] - v.w[s]) <= 1e-8);
    for (int s = 0; s < 5; ++s) {
        const cplx x = m.to_halfplane(v.w[s]);
        CHECK(std::abs(x - m.branch_image(s + 1, Norm{})) <= 1e-12 * std::max(1.0, std::abs(x)));
    }
    CHECK(std::isinf(m.to_halfplane(v.w[5]).real()));
    for (int s = 0; s < 5; ++s) {
        const cplx x = m.to_halfplane(0.5 * (v.w[s] + v.w[s + 1]));
        CHECK(x.imag() == 0.0);
        CHECK(x.real() > m.branch_image(s + 1, Norm{}));
    }
    CHECK(std::abs(m.to_heptagon(cplx(INFINITY, 0.0)) - v.w[5]) <= 1e-12);
}

TEST_CASE("interior round trips and upper half plane images") {
    const ConformalMap& m = reference_map();
    std::mt19937_64 r(13);
    std::uniform_real_distribution<double> re(0.0, 8.0), im(-1.85, 3.1);
    int n = 0;
    while (n < 30) {
        const cplx w(re(r), im(r));
        if (!contains(m.vertex_set(), w) || boundary_distance(m.vertex_set(), w) < 1e-3) continue;
        ++n;
        const cplx x = m.to_halfplane(w);
        CHECK(x.imag() > 0);
        CHECK(std::abs(m.to_heptagon(x) - w) <= 1e-8);
    }
    const cplx w = m.to_heptagon(cplx(1.5, 0.5));
    CHECK(std::abs(m.to_halfplane(w) - cplx(1.5, 0.5)) <= 1e-8);
}

TEST_CASE("theta-solved preimages agree with quadrature Abel-Jacobi images") {
    const ConformalMap& m = reference_map();
    const MapParams& p = reference_params();
    const Curve c = oracle::curve_from_params(p);
    for (cplx w : {cplx(0.5, 0.5), cplx(1.5, -1.2), cplx(3.0, 2.0), cplx(0.2, 3.0)}) {
        const auto s = m.solve_w(w);
        const CVec2 u = oracle::aj_by_quadrature(c, s.z);
        CHECK(lattice_distance(u, s.u, p.omega) <= 1e-8);
        CHECK(std::abs(m.cs_value(s.u) - w) <= 1e-8);
    }
}

TEST_CASE("local conformality: cross ratios survive at small scale") {
    const ConformalMap& m = reference_map();
    for (cplx w : {cplx(0.5, 0.5), cplx(1.5, 1.5), cplx(1.7, -1.3), cplx(5.0, 2.0)})
        CHECK(cross_ratio_defect(m, w, 1e-3) <= 1e-5);
}

TEST_CASE("domain errors") {
    const ConformalMap& m = reference_map();
    const MapParams& p = reference_params();
    auto code = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::ParseError;
    };
    CHECK(code([&] { m.to_halfplane(cplx(1.5, 5.0)); }) == ErrorCode::OutsideHeptagon);
    CHECK(code([&] { m.to_heptagon(cplx(0.5, -0.1)); }) == ErrorCode::OutsideHalfPlane);
    CHECK(code([&] { m.cs_value(p.u0.cast<cplx>()); }) == ErrorCode::AtPole);
    // a point on the divisor outside the closed H+ tile
    const auto s = m.solve_w(cplx(0.5, 0.5));
    CHECK(code([&] { m.cs_value(-s.u); }) == ErrorCode::WrongTile);
    CHECK(code([&] { m.to_halfplane(cplx(0.5, 0.5), Norm{2, 1, 6, 3}); }) == ErrorCode::BadLabel);
    Heptagon bad = reference();
    bad.H[3] = 3.0;
    CHECK(code([&] { solve_parameters(bad); }) == ErrorCode::InvalidHeptagon);
}

TEST_CASE("other normalizations are Mobius images of the default") {
    const ConformalMap& m = reference_map();
    const cplx w(1.2, 0.7);
    const cplx x = m.to_halfplane(w);
    const Norm n{2, 3, 1, 4};
    const cplx y = m.to_halfplane(w, n);
    CHECK(y.imag() > 0);
    CHECK(std::abs(m.to_heptagon(y, n) - w) <= 1e-8);
    // cross ratio with three branch points is chart independent
    auto cr = [](cplx p, cplx q, cplx r, cplx s) { return (p - r) * (q - s) / ((p - s) * (q - r)); };
    const cplx a = cr(x, m.branch_image(2, Norm{}), m.branch_image(3, Norm{}), m.branch_image(4, Norm{}));
    const cplx b = cr(y, m.branch_image(2, n), m.branch_image(3, n), m.branch_image(4, n));
    CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
}

}

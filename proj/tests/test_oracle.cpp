#include <doctest.h>

#include <cmath>
#include <random>

#include "heptamap/error.hpp"
#include "heptamap/mapper.hpp"
#include "heptamap/oracle.hpp"
#include "heptamap/quad.hpp"

using namespace hepta;

namespace {

Mat2 omega0() {
    Mat2 om;
    om << 2.0, 0.5, 0.5, 1.5;
    return om;
}

MapParams params_of(const ForwardResult& fr, int a, int b) {
    MapParams p;
    p.alpha = a;
    p.beta = b;
    p.omega = omega0();
    p.u0 = fr.u0;
    p.C = fr.C;
    return p;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("side lengths by quadrature match the theta formulas") {
    for (auto [a, b] : {std::pair{5, 6}, std::pair{1, 2}, std::pair{2, 4}, std::pair{3, 6}, std::pair{1, 5}}) {
        CAPTURE(a);
        CAPTURE(b);
        const ForwardResult fr = forward_sides(omega0(), 0.2, a, b);
        const auto q = oracle::sides_by_quadrature(oracle::curve_from_params(params_of(fr, a, b)), a, b);
        for (int s = 0; s < 5; ++s) CHECK(std::fabs(q[s] - fr.h.H[s]) <= 1e-8);
    }
}

TEST_CASE("edge increments are real or imaginary by direction") {
    const ForwardResult fr = forward_sides(omega0(), 0.3, 5, 6);
    const Curve c = oracle::curve_from_params(params_of(fr, 5, 6));
    std::array<double, 6> zs;
    std::copy(c.x.begin(), c.x.end(), zs.begin());
    const std::array<double, 3> poly{zs[4] * zs[5], -(zs[4] + zs[5]), 1.0};
    for (int s = 1; s <= 5; ++s) {
        const cplx I = quad::segment_integral(zs, poly, s, 1e-13);
        // i^s H_s = -I with H_s real
        const cplx h = -I / ipow(s);
        CHECK(std::fabs(h.imag()) <= 1e-10 * std::max(1.0, std::fabs(h.real())));
        CHECK(std::fabs(h.real() - fr.h.H[s - 1]) <= 1e-8);
    }
}

TEST_CASE("CS integral by quadrature matches the theta form") {
    const ForwardResult fr = forward_sides(omega0(), 0.2, 5, 6);
    const MapParams p = params_of(fr, 5, 6);
    const ConformalMap m(p);
    const Curve c = oracle::curve_from_params(p);
    std::mt19937_64 r(31);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    int n = 0;
    const auto& v = m.vertex_set();
    double lo = INFINITY, hi = -INFINITY, blo = INFINITY, bhi = -INFINITY;
    for (cplx w : v.w) {
        lo = std::min(lo, w.real());
        hi = std::max(hi, w.real());
        blo = std::min(blo, w.imag());
        bhi = std::max(bhi, w.imag());
    }
    while (n < 20) {
        const cplx w(lo + d(r) * (hi + 2 - lo), blo + d(r) * (bhi - blo));
        if (!contains(v, w) || boundary_distance(v, w) < 1e-3) continue;
        ++n;
        const auto s = m.solve_w(w);
        CHECK(std::abs(oracle::cs_by_quadrature(c, 5, 6, s.z) - w) <= 1e-8);
    }
    // ending at a branch point gives the vertex
    for (int s = 0; s < 5; ++s)
        CHECK(std::abs(oracle::cs_by_quadrature(c, 5, 6, cplx(c.x[s], 0.0)) - v.w[s]) <= 1e-8);
}

TEST_CASE("third-kind differential: integral representation and bilinear relation") {
    std::mt19937_64 r(41);
    std::uniform_real_distribution<double> d(0.1, 3.0);
    const Curve c = make_curve({-1.0, 0.0, 0.7, 1.5, 2.0, 3.5});
    for (int t = 0; t < 8; ++t) {
        const double a = -1.0 - d(r), b = a - 0.2 - d(r), p = -1.0 - d(r), q = p - 0.15 - d(r);
        const auto k = oracle::third_kind_check(c, {a, Sheet::Lower}, {b, Sheet::Lower}, {p, Sheet::Upper},
                                                {q, Sheet::Upper});
        CHECK(k.residual <= 1e-8);
        CHECK(k.bilinear[0] <= 1e-8);
        CHECK(k.bilinear[1] <= 1e-8);
        CHECK(k.antisymmetry <= 1e-8);
    }
}

TEST_CASE("oracle preconditions and refinement guard") {
    const Curve c = make_curve({-1.0, 0.0, 0.7, 1.5, 2.0, 3.5});
    CHECK_THROWS_AS(oracle::third_kind_check(c, {0.5, Sheet::Lower}, {-2.0, Sheet::Lower}, {-3.0, Sheet::Upper},
                                             {-4.0, Sheet::Upper}),
                    Error);
    const std::array<cplx, 2> below{cplx(-1.0, 0.0), cplx(0.5, -1.0)};
    CHECK_THROWS_AS(oracle::cs_by_quadrature(c, 5, 6, below), Error);
    const std::array<cplx, 2> wrong_start{cplx(0.3, 0.0), cplx(0.5, 1.0)};
    CHECK_THROWS_AS(oracle::cs_by_quadrature(c, 5, 6, wrong_start), Error);
}

}

#include <doctest.h>

#include <cmath>
#include <random>

#include "heptamap/error.hpp"
#include "heptamap/heptagon.hpp"
#include "heptamap/mapper.hpp"

using namespace hepta;

namespace {

Heptagon reference() {
    Heptagon h;
    h.H = {5.0, 2.0, 1.0, 1.0, kPi - 4.0};
    return h;
}

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
    for (const auto& x : v)
        if (x.rule == rule) return true;
    return false;
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool proper_cross(cplx a, cplx b, cplx c, cplx d) {
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

TEST_SUITE("heptagon") {

TEST_CASE("reference heptagon is valid") { CHECK(validate(reference()).empty()); }

TEST_CASE("no-intersection row of class (5,6)") {
    Heptagon h = reference();
    h.H[3] = 3.0;
    const auto v = validate(h);
    REQUIRE(v.size() == 1);
    CHECK(v.front().rule == "(5,6): -H2+H4<0");
}

TEST_CASE("sum rule and sign pattern") {
    Heptagon h = reference();
    h.H[0] = 6.0;
    CHECK(has_rule(validate(h), "sum: H1-H3+H5=pi"));
    // class (1,5): H1..H4 negative, H5 positive
    Heptagon g;
    g.alpha = 1;
    g.beta = 5;
    g.H = {-1.0, -1.0, -2.0, -0.5, kPi - 1.0};
    CHECK(validate(g).empty());
    g.H[1] = 1.0;
    CHECK(has_rule(validate(g), "sign: H2<0"));
    g.alpha = 6;
    CHECK(has_rule(validate(g), "indices: 1<=alpha<beta<=6"));
}

TEST_CASE("vertices follow the side recurrence") {
    const Heptagon h = reference();
    const VertexSet v = vertices(h);
    CHECK(v.w[0] == cplx(0.0, kPi));
    for (int s = 1; s <= 5; ++s) CHECK(std::abs(v.w[s - 1] - v.w[s] - ipow(s) * h.H[s - 1]) <= 1e-15);
    CHECK(std::fabs((v.w[0] - v.w[5]).imag() - kPi) <= 1e-14);
    Heptagon bad = h;
    bad.H[3] = 3.0;
    CHECK_THROWS_AS(vertices(bad), Error);
}

TEST_CASE("reflection swaps the class and conjugates the polygon") {
    const Heptagon h = reference();
    const Heptagon r = reflect(h);
    CHECK(r.alpha == 1);
    CHECK(r.beta == 2);
    CHECK(validate(r).empty());
    const Heptagon back = reflect(r);
    CHECK(back.alpha == h.alpha);
    CHECK(back.H == h.H);
    const VertexSet a = vertices(h), b = vertices(r);
    const cplx t = b.w[0] - std::conj(a.w[5]);
    for (int s = 0; s < 6; ++s) CHECK(std::abs(b.w[s] - (std::conj(a.w[5 - s]) + t)) <= 1e-13);
}

TEST_CASE("valid heptagons of every class are simple polygons") {
    std::mt19937_64 r(99);
    std::uniform_real_distribution<double> d(0.8, 3.0), f(0.15, 0.85), u(0.08, 0.42);
    int made = 0;
    for (int a = 1; a <= 6; ++a)
        for (int b = a + 1; b <= 6; ++b)
            for (int t = 0; t < 40; ++t) {
                Mat2 om;
                om(0, 0) = d(r);
                om(1, 1) = d(r);
                om(0, 1) = om(1, 0) = f(r) * std::min(om(0, 0), om(1, 1));
                ForwardResult fr;
                try {
                    fr = forward_sides(om, u(r), a, b);
                } catch (const Error&) {
                    continue;
                }
                if (!fr.violations.empty()) continue;
                ++made;
                const VertexSet v = vertices(fr.h);
                const auto p = outline(v, channel_cut(v, 0.0));
                const std::size_t n = p.size();
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 2; j < n; ++j) {
                        if (i == 0 && j == n - 1) continue;
                        CHECK_FALSE(proper_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]));
                    }
                // the channel start lies inside, a point far west does not
                CHECK(contains(v, 0.5 * (v.w[0] + v.w[5]) + 1.0));
                CHECK_FALSE(contains(v, cplx(-1e3, 0.5 * kPi)));
            }
    CHECK(made >= 15 * 10);
}

TEST_CASE("containment and distances for the reference heptagon") {
    const VertexSet v = vertices(reference());
    CHECK(contains(v, cplx(1.5, 0.5)));
    CHECK(contains(v, cplx(40.0, 1.0)));
    CHECK_FALSE(contains(v, cplx(1.5, 5.0)));
    CHECK(boundary_distance(v, cplx(1.5, 0.5)) == doctest::Approx(0.5));
    CHECK(segment_inside(v, cplx(0.5, 0.5), cplx(20.0, 0.5)));
    CHECK_FALSE(segment_inside(v, cplx(0.5, 0.5), cplx(0.5, 6.0)));
}

}

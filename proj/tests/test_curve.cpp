#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "heptamap/curve.hpp"
#include "heptamap/error.hpp"

using namespace hepta;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::array<double, 6> kXs{0, 1, 2, 3, 4, 5};

// int_{x_s}^{x_{s+1}} x^p / |y| dx by tanh-sinh after x = a + (b - a) sin^2(t)
double raw(const std::array<double, 6>& xs, int s, int p) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double a = xs[s - 1], b = xs[s];
    return ts.integrate(
        [&](double t) {
            const double x = a + (b - a) * std::sin(t) * std::sin(t);
            double q = 1;
            for (int k = 0; k < 6; ++k)
                if (k != s - 1 && k != s) q *= x - xs[k];
            return 2 * std::pow(x, p) / std::sqrt(std::fabs(q));
        },
        0.0, std::acos(-1.0) / 2, 1e-14);
}

}  // namespace

TEST_SUITE("curve") {

TEST_CASE("Mobius normalization sends three points to 0, 1, inf") {
    const Mobius m = Mobius::from_three(-2.0, 0.5, 3.0);
    CHECK(m(-2.0) == doctest::Approx(0.0));
    CHECK(m(0.5) == doctest::Approx(1.0));
    CHECK(std::isinf(m(3.0)));
    CHECK(m.a * m.d - m.b * m.c > 0);
    const Mobius n = Mobius::from_three(1.0, kInf, 4.0);
    CHECK(n(kInf) == doctest::Approx(1.0));
    CHECK(m.inverse()(m(1.7)) == doctest::Approx(1.7));
}

TEST_CASE("curve construction validates cyclic order and the marked point") {
    CHECK_NOTHROW(make_curve(kXs, -1.0));
    CHECK_THROWS_AS(make_curve({0, 2, 1, 3, 4, 5}), Error);
    CHECK_THROWS_AS(make_curve(kXs, 2.5), Error);
    CHECK_THROWS_AS(make_curve(kXs, 0.0), Error);
    CHECK_NOTHROW(make_curve({0, 1, 2, 3, 5, kInf}));
}

TEST_CASE("marked chart keeps the cyclic order and sends x0 to infinity") {
    const Curve c = to_marked_chart(make_curve(kXs, -1.5));
    CHECK(c.x0.has_value());
    CHECK(std::isinf(*c.x0));
    for (int k = 0; k < 5; ++k) CHECK(c.x[k] < c.x[k + 1]);
    CHECK(c.x[0] == doctest::Approx(1 / (-1.5 - 0.0)));
}

TEST_CASE("period matrix: purely imaginary, symmetric, inside the cone") {
    const PeriodData pd = period_matrix(make_curve(kXs));
    const Mat2& om = pd.omega;
    CHECK(om(0, 1) > 0);
    CHECK(om(0, 1) < std::min(om(0, 0), om(1, 1)));
    CHECK(om.ldlt().isPositive());
    CHECK(std::fabs(om(0, 1) - om(1, 0)) == 0.0);
}

TEST_CASE("period matrix against tanh-sinh periods") {
    // a-periods 2 I_2, -2 I_4 give the normalization; b-rows come from segments 1 and 5
    Mat2 M;
    for (int p = 0; p < 2; ++p) {
        M(0, p) = 2 * raw(kXs, 2, p);
        M(1, p) = -2 * raw(kXs, 4, p);
    }
    const Mat2 D = M.inverse();
    const Mat2 om = period_matrix(make_curve(kXs)).omega;
    for (int j = 0; j < 2; ++j) {
        const double b1 = 2 * std::fabs(raw(kXs, 1, 0) * D(0, j) + raw(kXs, 1, 1) * D(1, j));
        const double b2 = 2 * std::fabs(raw(kXs, 5, 0) * D(0, j) + raw(kXs, 5, 1) * D(1, j));
        CHECK(std::fabs(om(0, j) - b1) <= 1e-10);
        CHECK(std::fabs(om(1, j) - b2) <= 1e-10);
    }
}

TEST_CASE("period matrix is invariant under real Mobius changes of chart") {
    const Curve c = make_curve(kXs, -1.0);
    const Mat2 a = period_matrix(c).omega;
    const Mat2 b = period_matrix(to_marked_chart(c)).omega;
    CHECK((a - b).norm() <= 1e-11);
}

TEST_CASE("branch points map to the half-period table") {
    const Curve c = make_curve(kXs);
    const PeriodData pd = period_matrix(c);
    const CVec2 p2 = aj_branch_quadrature(c, pd, 2);
    const CVec2 want2 = 0.5 * kI * pd.omega.col(0).cast<cplx>();
    CHECK(lattice_distance(p2, want2, pd.omega) <= 1e-9);
    const CVec2 p6 = aj_branch_quadrature(c, pd, 6);
    CHECK(lattice_distance(p6, CVec2(0.5, 0.5), pd.omega) <= 1e-9);
    for (int k = 1; k <= 6; ++k) {
        CHECK(lattice_distance(aj_branch_quadrature(c, pd, k), half_period(k, pd.omega), pd.omega) <= 1e-9);
        CHECK(lattice_distance(boundary_half_period(k, pd.omega), half_period(k, pd.omega), pd.omega) <= 1e-12);
    }
}

TEST_CASE("upper half plane points land on the theta divisor in the H+ tile") {
    const Curve c = make_curve(kXs);
    const PeriodData pd = period_matrix(c);
    const RiemannMatrix rm = RiemannMatrix::from_omega(pd.omega);
    std::mt19937_64 r(7);
    std::uniform_real_distribution<double> re(-1.0, 6.0), im(0.05, 3.0);
    for (int t = 0; t < 25; ++t) {
        const cplx x(re(r), im(r));
        const CVec2 u = aj_point(c, pd, {x, Sheet::Upper});
        const ThetaEval e = theta_eval(RealChar(char_from_indices({3, 5})), u, rm);
        CHECK(std::abs(e.value) <= 1e-9 * e.max_term);
        CHECK(tile_of(u, pd.omega).is_hplus());
        // the lower sheet is the negated point
        CHECK((aj_point(c, pd, {x, Sheet::Lower}) + u).norm() <= 1e-12);
    }
}

TEST_CASE("Rosenhain round trip for a chart containing infinity") {
    const Curve c = to_finite_chart(make_curve({0, 1, 2, 3, 5, kInf}));
    const Mat2 om = period_matrix(c).omega;
    const auto x = rosenhain(om);
    CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(x[2] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(x[0] < x[1]);
    CHECK(x[1] < x[2]);
    const auto y = rosenhain_complement(om);
    for (int k = 0; k < 3; ++k) CHECK(std::fabs(y[k] - (1 - x[k])) <= 1e-10 * std::fabs(1 - x[k]));
}

TEST_CASE("projection recovers the Rosenhain coordinate") {
    const Curve c = make_curve({-1.0, 0.2, 0.9, 2.0, 2.4, 6.0});
    const PeriodData pd = period_matrix(c);
    const Mobius m = rosenhain_map(c);
    const Projection P(pd.omega, Norm{});
    for (cplx x : {cplx(0.5, 0.3), cplx(-3.0, 1.0), cplx(2.2, 0.01), cplx(10.0, 5.0)}) {
        const CVec2 u = aj_point(c, pd, {x, Sheet::Upper});
        CHECK(std::abs(P(u) - m(x)) <= 1e-9 * std::max(1.0, std::abs(m(x))));
        CHECK(std::abs(project_to_sphere(pd.omega, u, Norm{}) - m(x)) <= 1e-9 * std::max(1.0, std::abs(m(x))));
    }
    // real points on the third oval project to the negative axis
    const CVec2 u = aj_point(c, pd, {cplx(-2.0, 0.0), Sheet::Upper});
    CHECK(P(u).real() < 0);
}

TEST_CASE("bad labels are rejected") {
    Mat2 om;
    om << 2.0, 0.5, 0.5, 1.5;
    CHECK_THROWS_AS(half_period(7, om), Error);
    CHECK_THROWS_AS(Projection(om, Norm{1, 1, 6, 3}), Error);
}

}

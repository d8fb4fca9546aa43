#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "heptamap/simd.hpp"
#include "heptamap/theta.hpp"

using namespace hepta;

namespace {

struct Arrays {
    std::vector<double> re, im, a, b;
};

Arrays random_arrays(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 r(seed);
    std::uniform_real_distribution<double> re(-30.0, 2.0), im(-50.0, 50.0), w(-3.0, 3.0);
    Arrays x;
    for (std::size_t k = 0; k < n; ++k) {
        x.re.push_back(re(r));
        x.im.push_back(im(r));
        x.a.push_back(w(r));
        x.b.push_back(w(r));
    }
    return x;
}

double rel(std::complex<double> a, std::complex<double> b, double scale) { return std::abs(a - b) / scale; }

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar backend always available and selectable") {
    CHECK(simd::available(simd::Backend::Scalar));
    CHECK(std::string(simd::backend_name(simd::Backend::Scalar)) == "scalar");
    CHECK(simd::available(simd::best_backend()));
}

TEST_CASE("exp_sum agrees across backends for all tail lengths") {
    if (!simd::available(simd::Backend::Avx2)) return;
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 1000u}) {
        const Arrays x = random_arrays(n, 17 + n);
        const auto s = simd::exp_sum(simd::Backend::Scalar, x.re.data(), x.im.data(), x.a.data(), x.b.data(), n);
        const auto v = simd::exp_sum(simd::Backend::Avx2, x.re.data(), x.im.data(), x.a.data(), x.b.data(), n);
        const double sc = std::max(1e-300, s.max_abs) * (1 + n);
        CHECK(rel(s.s0, v.s0, sc) < 1e-14);
        CHECK(rel(s.s1, v.s1, sc) < 1e-14);
        CHECK(rel(s.s2, v.s2, sc) < 1e-14);
        CHECK(s.max_abs == doctest::Approx(v.max_abs).epsilon(1e-14));
        const auto u = simd::exp_sum(simd::Backend::Avx2, x.re.data(), x.im.data(), nullptr, nullptr, n);
        CHECK(rel(u.s0, s.s0, sc) < 1e-14);
    }
}

TEST_CASE("exp_cis agrees across backends") {
    if (!simd::available(simd::Backend::Avx2)) return;
    const std::size_t n = 203;
    const Arrays x = random_arrays(n, 5);
    std::vector<double> r1(n), i1(n), r2(n), i2(n);
    simd::exp_cis(simd::Backend::Scalar, x.re.data(), x.im.data(), r1.data(), i1.data(), n);
    simd::exp_cis(simd::Backend::Avx2, x.re.data(), x.im.data(), r2.data(), i2.data(), n);
    for (std::size_t k = 0; k < n; ++k) {
        const double m = std::exp(x.re[k]);
        CHECK(std::fabs(r1[k] - r2[k]) <= 1e-14 * m);
        CHECK(std::fabs(i1[k] - i2[k]) <= 1e-14 * m);
    }
}

TEST_CASE("inv_sqrt_poly_sum agrees across backends") {
    if (!simd::available(simd::Backend::Avx2)) return;
    const double roots[6] = {-2.0, -0.5, 0.0, 1.0, 2.5, 4.0};
    const double poly[3] = {0.3, -1.2, 0.7};
    std::mt19937_64 r(9);
    std::uniform_real_distribution<double> d(0.01, 0.49);
    for (std::size_t n : {1u, 4u, 6u, 65u}) {
        std::vector<double> x(n);
        for (double& v : x) v = d(r);
        const double a = simd::inv_sqrt_poly_sum(simd::Backend::Scalar, x.data(), n, poly, 3, roots, 6);
        const double b = simd::inv_sqrt_poly_sum(simd::Backend::Avx2, x.data(), n, poly, 3, roots, 6);
        CHECK(a == doctest::Approx(b).epsilon(1e-14));
    }
}

TEST_CASE("theta evaluation is backend independent") {
    if (!simd::available(simd::Backend::Avx2)) return;
    Mat2 om;
    om << 1.3, 0.4, 0.4, 0.9;
    const RiemannMatrix rm = RiemannMatrix::from_omega(om);
    ThetaOptions so, vo;
    so.backend = simd::Backend::Scalar;
    vo.backend = simd::Backend::Avx2;
    const CVec2 u(cplx(0.21, -0.4), cplx(-0.33, 0.27));
    for (const IntChar& c : all_chars()) {
        const ThetaEval a = theta_eval(RealChar(c), u, rm, so);
        const ThetaEval b = theta_eval(RealChar(c), u, rm, vo);
        CHECK(std::abs(a.value - b.value) <= 1e-14 * a.max_term);
        CHECK((a.grad - b.grad).norm() <= 1e-13 * a.max_term);
    }
}

}

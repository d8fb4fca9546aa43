#include "heptamap/quad.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "heptamap/error.hpp"

namespace hepta::quad {

namespace {

std::vector<double> cheb_nodes(double a, double b, int n) {
    std::vector<double> x(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int k = 0; k < n; ++k) x[k] = mid + half * std::cos((2 * k + 1) * kPi / (2.0 * n));
    return x;
}

template <class Sum>
ChebResult cheb_loop(Sum&& sum, double tol) {
    ChebResult r;
    double prev = sum(kMinNodes) * kPi / kMinNodes;
    for (int n = 2 * kMinNodes; n <= kMaxNodes; n *= 2) {
        const double cur = sum(n) * kPi / n;
        r.error = std::fabs(cur - prev);
        r.value = cur;
        r.nodes = n;
        if (r.error <= tol * std::max(1.0, std::fabs(cur))) return r;
        prev = cur;
    }
    throw Error(ErrorCode::NoConvergence, "Gauss-Chebyshev node cap reached");
}

void check_order(const std::array<double, 6>& xs) {
    for (int k = 0; k < 5; ++k)
        if (!(xs[k] < xs[k + 1]) || !std::isfinite(xs[k]) || !std::isfinite(xs[k + 1]))
            throw Error(ErrorCode::BadSegment, "branch points must be finite and increasing");
}

double eval_poly(std::span<const double> p, double x) {
    double v = 0;
    for (std::size_t j = p.size(); j-- > 0;) v = v * x + p[j];
    return v;
}

}  // namespace

ChebResult cheb_singular_detail(const std::function<double(double)>& f, double a, double b,
                                double tol) {
    if (!(a < b)) throw Error(ErrorCode::BadSegment, "cheb_singular needs a < b");
    return cheb_loop(
        [&](int n) {
            double s = 0;
            for (double x : cheb_nodes(a, b, n)) s += f(x);
            return s;
        },
        tol);
}

double cheb_singular(const std::function<double(double)>& f, double a, double b, double tol) {
    return cheb_singular_detail(f, a, b, tol).value;
}

cplx yplus(std::span<const double> xs, cplx x) {
    cplx y = 1.0;
    for (double s : xs) y *= std::sqrt(x - s);
    return y;
}

cplx segment_integral(const std::array<double, 6>& xs, std::span<const double> poly, int seg,
                      double tol, simd::Backend be) {
    check_order(xs);
    if (seg < 1 || seg > 6) throw Error(ErrorCode::BadSegment, "segment index out of range");
    if (poly.size() > 3) throw Error(ErrorCode::BadSegment, "polynomial degree above 2");
    if (seg < 6) {
        const double a = xs[seg - 1], b = xs[seg];
        std::array<double, 4> others{};
        int m = 0;
        for (int j = 0; j < 6; ++j)
            if (j != seg - 1 && j != seg) others[m++] = xs[j];
        const int np = static_cast<int>(poly.size());
        const ChebResult r = cheb_loop(
            [&](int n) {
                const std::vector<double> x = cheb_nodes(a, b, n);
                return simd::inv_sqrt_poly_sum(be, x.data(), x.size(), poly.data(), np,
                                               others.data(), 4);
            },
            tol);
        // y+ = i^{6-seg} sqrt|prod| on the open segment
        return r.value / ipow(6 - seg);
    }
    // through infinity: x = c - 1/t, t from 1/(c-x6) to 1/(c-x1)
    if (poly.size() == 3 && poly[2] != 0.0)
        throw Error(ErrorCode::BadSegment, "quadratic numerator has a pole at infinity");
    const double p0 = poly.size() > 0 ? poly[0] : 0.0;
    const double p1 = poly.size() > 1 ? poly[1] : 0.0;
    const double c = 0.5 * (xs[2] + xs[3]);
    double K = 1;
    for (double s : xs) K *= std::fabs(c - s);
    std::array<double, 4> ts{};
    for (int j = 1; j <= 4; ++j) ts[j - 1] = 1.0 / (c - xs[j]);
    const std::array<double, 2> q{-p1, p1 * c + p0};
    const double ta = 1.0 / (c - xs[5]), tb = 1.0 / (c - xs[0]);
    const ChebResult r = cheb_loop(
        [&](int n) {
            const std::vector<double> t = cheb_nodes(ta, tb, n);
            return simd::inv_sqrt_poly_sum(be, t.data(), t.size(), q.data(), 2, ts.data(), 4);
        },
        tol * std::sqrt(K));
    return -r.value / std::sqrt(K);
}

cplx partial_integral(const std::array<double, 6>& xs, std::span<const double> poly, int s,
                      double x_end, double tol) {
    check_order(xs);
    if (s < 1 || s > 6) throw Error(ErrorCode::BadSegment, "branch label out of range");
    const double xs0 = xs[s - 1];
    const double lo = (s == 1) ? -INFINITY : xs[s - 2];
    const double hi = (s == 6) ? INFINITY : xs[s];
    if (!(x_end > lo && x_end < hi) || x_end == xs0)
        throw Error(ErrorCode::BadSegment, "end point not in an interval adjacent to x_s");
    int above = 0;
    const double probe = 0.5 * (xs0 + x_end);
    for (double v : xs) above += v > probe;
    const cplx phase = ipow(above);
    const double d = x_end - xs0;
    auto g = [&](double t) {
        const double x = xs0 + d * t * t;
        double prod = std::fabs(d);
        for (int j = 0; j < 6; ++j)
            if (j != s - 1) prod *= std::fabs(x - xs[j]);
        // sqrt|x - x_s| = |t| sqrt|d|, the t cancels against dx = 2 d t dt
        return eval_poly(poly, x) * 2.0 * d / std::sqrt(prod);
    };
    double err = 0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        g, 0.0, 1.0, 18, tol, &err);
    if (!std::isfinite(v)) throw Error(ErrorCode::PathThroughSingularity, "partial integral");
    return v / phase;
}

namespace {

struct GkRule {
    std::vector<double> x, wk, wg;  // non-negative nodes, Kronrod and embedded Gauss weights
};

const GkRule& gk31() {
    static const GkRule rule = [] {
        using K = boost::math::quadrature::gauss_kronrod<double, 31>;
        using G = boost::math::quadrature::gauss<double, 15>;
        GkRule r;
        r.x.assign(K::abscissa().begin(), K::abscissa().end());
        r.wk.assign(K::weights().begin(), K::weights().end());
        r.wg.assign(r.x.size(), 0.0);
        for (std::size_t i = 0; i < r.x.size(); ++i)
            for (std::size_t j = 0; j < G::abscissa().size(); ++j)
                if (std::fabs(r.x[i] - G::abscissa()[j]) < 1e-15) r.wg[i] = G::weights()[j];
        return r;
    }();
    return rule;
}

struct Piece {
    double a, b;
    cplx value;
    double err, l1;
    bool operator<(const Piece& o) const { return err < o.err; }
};

template <class G>
Piece gk_piece(const G& g, double a, double b) {
    const GkRule& r = gk31();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx k = 0, gs = 0;
    double l1 = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const cplx f1 = g(c + h * r.x[i]);
        const cplx f2 = r.x[i] == 0.0 ? cplx(0.0) : g(c - h * r.x[i]);
        const cplx sum = f1 + f2;
        k += r.wk[i] * sum;
        gs += r.wg[i] * sum;
        l1 += r.wk[i] * (std::abs(f1) + std::abs(f2));
    }
    return {a, b, h * k, std::abs(h * (k - gs)), h * l1};
}

}  // namespace

std::vector<cplx> arch_path(std::span<const double> xs, cplx z) {
    const double lo = *std::min_element(xs.begin(), xs.end()), hi = *std::max_element(xs.begin(), xs.end());
    const double h = std::max(z.imag(), 0.5 * (hi - lo));
    std::vector<cplx> p{cplx(xs[0], 0.0), cplx(xs[0], h), cplx(z.real(), h)};
    if (p.back() != z) p.push_back(z);
    return p;
}

cplx line_integral(const std::function<cplx(cplx)>& f, std::span<const cplx> path,
                   const LineOptions& opt) {
    if (path.size() < 2) return 0.0;
    auto guard = [](cplx v) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorCode::PathThroughSingularity, "non-finite integrand on path");
        return v;
    };
    // globally adaptive on the complex integrand; stops at tol relative to max(|I|, 1e-3 int |f|)
    auto integrate = [&](auto&& g) {
        auto gg = [&](double t) { return guard(g(t)); };
        std::vector<Piece> heap{gk_piece(gg, 0.0, 1.0)};
        const std::size_t max_pieces = std::size_t(1) << std::min(opt.max_depth, 14);
        while (true) {
            cplx total = 0;
            double err = 0, l1 = 0;
            for (const Piece& p : heap) {
                total += p.value;
                err += p.err;
                l1 += p.l1;
            }
            if (err <= opt.tol * std::max(std::abs(total), 1e-3 * l1) || heap.size() >= max_pieces) return total;
            std::pop_heap(heap.begin(), heap.end());
            const Piece worst = heap.back();
            heap.pop_back();
            const double m = 0.5 * (worst.a + worst.b);
            if (!(m > worst.a && m < worst.b)) return total;
            heap.push_back(gk_piece(gg, worst.a, m));
            std::push_heap(heap.begin(), heap.end());
            heap.push_back(gk_piece(gg, m, worst.b));
            std::push_heap(heap.begin(), heap.end());
        }
    };
    cplx total = 0.0;
    const std::size_t pieces = path.size() - 1;
    for (std::size_t k = 0; k < pieces; ++k) {
        const cplx p = path[k], q = path[k + 1];
        const bool s0 = opt.singular_start && k == 0;
        const bool s1 = opt.singular_end && k + 1 == pieces;
        if (s0 && s1) {
            const cplx m = 0.5 * (p + q);
            total += integrate([&](double t) { return f(p + (m - p) * t * t) * 2.0 * (m - p) * t; });
            total += integrate([&](double t) { return f(q + (m - q) * t * t) * 2.0 * (q - m) * t; });
        } else if (s0) {
            total += integrate([&](double t) { return f(p + (q - p) * t * t) * 2.0 * (q - p) * t; });
        } else if (s1) {
            total += integrate([&](double t) { return f(q + (p - q) * t * t) * 2.0 * (q - p) * t; });
        } else {
            total += integrate([&](double t) { return f(p + (q - p) * t) * (q - p); });
        }
    }
    return total;
}

}  // namespace hepta::quad

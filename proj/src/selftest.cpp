#include "heptamap/selftest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "heptamap/curve.hpp"
#include "heptamap/error.hpp"
#include "heptamap/heptagon.hpp"
#include "heptamap/mapper.hpp"
#include "heptamap/oracle.hpp"
#include "heptamap/quad.hpp"
#include "heptamap/theta.hpp"

namespace hepta::selftest {

namespace {

using Clock = std::chrono::steady_clock;
using Rng = std::mt19937_64;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double uni(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

struct Metric {
    std::string name;
    double value = 0;
    double limit = 0;
    bool below = true;  // pass iff value <= limit (or >= when false)

    bool ok() const { return std::isfinite(value) && (below ? value <= limit : value >= limit); }
};

Check finish(int id, std::string name, const std::vector<Metric>& ms, Clock::time_point t0,
             std::string failure = {}) {
    Check c;
    c.id = id;
    c.name = std::move(name);
    c.pass = failure.empty();
    for (const Metric& m : ms) {
        c.metrics.push_back(m.name + "=" + sci(m.value) + (m.below ? " (<= " : " (>= ") + sci(m.limit) + ")");
        c.pass = c.pass && m.ok();
    }
    c.seconds = seconds_since(t0);
    c.failure = std::move(failure);
    return c;
}

// cyclically ordered finite sextuple with a minimum gap
std::array<double, 6> random_sextuple(Rng& r) {
    while (true) {
        std::array<double, 6> x;
        for (double& v : x) v = uni(r, -4.0, 4.0);
        std::sort(x.begin(), x.end());
        bool ok = true;
        for (int k = 0; k < 5; ++k) ok = ok && x[k + 1] - x[k] > 0.15;
        if (ok) return x;
    }
}

std::complex<long double> brute_theta(const IntChar& c, const CVec2& u, const CMat2& pi) {
    using LC = std::complex<long double>;
    const long double pl = std::acos(-1.0L);
    LC sum = 0;
    for (int m1 = -30; m1 <= 30; ++m1)
        for (int m2 = -30; m2 <= 30; ++m2) {
            const long double n1 = m1 + 0.5L * c.eps[0], n2 = m2 + 0.5L * c.eps[1];
            const LC q = LC(pi(0, 0)) * (n1 * n1) + LC(pi(0, 1)) * (2 * n1 * n2) + LC(pi(1, 1)) * (n2 * n2);
            const LC l = n1 * (LC(u[0]) + 0.5L * c.epsp[0]) + n2 * (LC(u[1]) + 0.5L * c.epsp[1]);
            sum += std::exp(LC(0, pl) * q + LC(0, 2 * pl) * l);
        }
    return sum;
}

CVec2 du_integral(const std::array<double, 6>& xs, const Mat2& du, std::span<const cplx> path, bool end_singular) {
    quad::LineOptions lo;
    lo.tol = 1e-14;
    lo.singular_start = true;
    lo.singular_end = end_singular;
    const cplx ix = quad::line_integral([&](cplx z) { return z / quad::yplus(xs, z); }, path, lo);
    const cplx i1 = quad::line_integral([&](cplx z) { return 1.0 / quad::yplus(xs, z); }, path, lo);
    CVec2 u;
    for (int j = 0; j < 2; ++j) u[j] = ix * du(0, j) + i1 * du(1, j);
    return u;
}

// from a in upper half plane around to b along a rectangle of height h
std::vector<cplx> rect(double a, double b, double h) { return {a, cplx(a, h), cplx(b, h), b}; }

}  // namespace

Check theta_correctness(const Options& o) {
    const auto t0 = Clock::now();
    const double f = o.tol / 1e-9;
    Rng r(o.seed + 1);
    const auto chars = all_chars();
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        Mat2 B;
        B << uni(r, -0.6, 0.6), uni(r, -0.6, 0.6), uni(r, -0.6, 0.6), uni(r, -0.6, 0.6);
        const Mat2 Y = 0.5 * Mat2::Identity() + B * B.transpose();
        Mat2 X;
        X(0, 0) = uni(r, -0.5, 0.5);
        X(1, 1) = uni(r, -0.5, 0.5);
        X(0, 1) = X(1, 0) = uni(r, -0.5, 0.5);
        const CMat2 pi = X.cast<cplx>() + kI * Y.cast<cplx>();
        const CVec2 u(cplx(uni(r, -1, 1), uni(r, -0.5, 0.5)), cplx(uni(r, -1, 1), uni(r, -0.5, 0.5)));
        const IntChar& c = chars[t % 16];
        const RiemannMatrix rm(pi);
        const ThetaEval e = theta_eval(RealChar(c), u, rm);
        const auto b = brute_theta(c, u, pi);
        const cplx bd(static_cast<double>(b.real()), static_cast<double>(b.imag()));
        worst = std::max(worst, std::abs(e.value - bd) / std::max(1.0, std::abs(bd)));
    }
    // odd theta constants vanish identically
    double odd = 0;
    Mat2 om;
    om << 2.0, 0.5, 0.5, 1.5;
    const RiemannMatrix rm = RiemannMatrix::from_omega(om);
    for (const IntChar& c : chars)
        if (char_parity(c) == Parity::Odd) odd = std::max(odd, std::abs(theta_const(c, rm)));
    const double secs = seconds_since(t0);
    return finish(1, "theta series vs brute force",
                  {{"max_rel_err", worst, 1e-12 * f}, {"odd_constants", odd, 0.0}, {"seconds", secs, 5.0}},
                  t0);
}

Check periods_and_aj(const Options& o) {
    const auto t0 = Clock::now();
    const double f = o.tol / 1e-9;
    Rng r(o.seed + 2);
    double re_pi = 0, aj = 0, omega_gap = 0, cone = 0;
    std::string failure;
    for (int t = 0; t < 20 && failure.empty(); ++t) {
        const auto xs = random_sextuple(r);
        try {
            const Curve c = make_curve(xs);
            const PeriodData pd = period_matrix(c, 1e-14);
            const Mat2& om = pd.omega;
            Eigen::SelfAdjointEigenSolver<Mat2> es(om);
            if (!(es.eigenvalues().minCoeff() > 0)) cone = 1;
            if (!(om(0, 1) > 0 && om(0, 1) < std::min(om(0, 0), om(1, 1)))) cone = 1;
            // b-periods through the upper half plane carry the full complex value
            const double h1 = 0.5 * (xs[1] - xs[0]), h5 = 0.5 * (xs[5] - xs[4]);
            const auto p1 = rect(xs[0], xs[1], h1), p5 = rect(xs[4], xs[5], h5);
            const CVec2 b1 = -2.0 * pd.b_sign[0] * du_integral(xs, pd.du, p1, true);
            const CVec2 b2 = 2.0 * pd.b_sign[1] * du_integral(xs, pd.du, p5, true);
            for (int j = 0; j < 2; ++j) {
                re_pi = std::max({re_pi, std::fabs(b1[j].real()), std::fabs(b2[j].real())});
                omega_gap = std::max({omega_gap, std::fabs(b1[j].imag() - om(0, j)), std::fabs(b2[j].imag() - om(1, j))});
            }
            const double h = 0.5 * (xs[5] - xs[0]);
            for (int k = 2; k <= 6; ++k) {
                const std::vector<cplx> path{xs[0], cplx(xs[0], h), cplx(xs[k - 1], h), xs[k - 1]};
                const CVec2 u = du_integral(xs, pd.du, path, true);
                aj = std::max(aj, lattice_distance(u, half_period(k, om), om));
            }
        } catch (const Error& e) {
            failure = e.what();
        }
    }
    return finish(2, "period matrix and branch-point AJ",
                  {{"cone_or_spd_violations", cone, 0.0},
                   {"max_abs_re_pi", re_pi, 1e-10 * f},
                   {"im_pi_vs_omega", omega_gap, 1e-10 * f},
                   {"aj_vs_table_mod_lattice", aj, 1e-9 * f},
                   {"seconds", seconds_since(t0), 60.0}},
                  t0, failure);
}

Check rosenhain_round_trip(const Options& o) {
    const auto t0 = Clock::now();
    const double f = o.tol / 1e-9;
    Rng r(o.seed + 3);
    double rel = 0, cross = 0;
    std::string failure;
    for (int t = 0; t < 20 && failure.empty(); ++t) {
        const auto xs = random_sextuple(r);
        try {
            const Curve c = make_curve(xs);
            const Mobius m = rosenhain_map(c);
            const PeriodData pd = period_matrix(c, 1e-14);
            const auto x = rosenhain(pd.omega);
            const auto cx = rosenhain_complement(pd.omega);
            for (int k = 0; k < 3; ++k) {
                const double want = m(xs[k + 2]);
                rel = std::max(rel, std::fabs(x[k] - want) / std::fabs(want));
                cross = std::max(cross, std::fabs(cx[k] - (1 - x[k])) / std::max(1.0, std::fabs(1 - x[k])));
            }
        } catch (const Error& e) {
            failure = e.what();
        }
    }
    return finish(3, "Rosenhain round trip",
                  {{"max_rel_err", rel, 1e-9 * f}, {"complement_consistency", cross, 1e-10 * f},
                   {"seconds", seconds_since(t0), 30.0}},
                  t0, failure);
}

Check divisor_and_projection(const Options& o) {
    const auto t0 = Clock::now();
    const double f = o.tol / 1e-9;
    Rng r(o.seed + 4);
    double div = 0, proj = 0;
    std::string failure;
    const IntChar c35 = char_from_indices({3, 5});
    for (int t = 0; t < 5 && failure.empty(); ++t) {
        const auto xs = random_sextuple(r);
        try {
            const Curve c = make_curve(xs);
            const PeriodData pd = period_matrix(c, 1e-14);
            const RiemannMatrix rm = RiemannMatrix::from_omega(pd.omega);
            const Mobius m = rosenhain_map(c);
            const Projection P(pd.omega, Norm{});
            const double span = xs[5] - xs[0];
            for (int k = 0; k < 50; ++k) {
                const cplx x(xs[0] + span * uni(r, -0.2, 1.2), span * uni(r, 0.02, 1.0));
                const CVec2 u = aj_point(c, pd, SurfacePoint{x, Sheet::Upper}, 1e-14);
                const ThetaEval e = theta_eval(RealChar(c35), u, rm);
                div = std::max(div, std::abs(e.value) / e.max_term);
                const cplx want = m(x);
                proj = std::max(proj, std::abs(P(u) - want) / std::max(1.0, std::abs(want)));
            }
        } catch (const Error& e) {
            failure = e.what();
        }
    }
    return finish(4, "theta divisor and projection",
                  {{"max_theta35_over_scale", div, 1e-9 * f}, {"max_projection_rel_err", proj, 1e-9 * f}}, t0,
                  failure);
}

Check third_kind(const Options& o) {
    const auto t0 = Clock::now();
    const double f = o.tol / 1e-9;
    Rng r(o.seed + 5);
    double res = 0, bil = 0, anti = 0;
    std::string failure;
    for (int t = 0; t < 10 && failure.empty(); ++t) {
        const auto xs = random_sextuple(r);
        try {
            const Curve c = make_curve(xs);
            std::array<double, 4> pts;
            bool spread = false;
            while (!spread) {
                for (double& v : pts) v = xs[0] - uni(r, 0.05, 3.0);
                spread = true;
                for (int a = 0; a < 4; ++a)
                    for (int b = a + 1; b < 4; ++b) spread = spread && std::fabs(pts[a] - pts[b]) > 0.1;
            }
            const auto k = oracle::third_kind_check(c, {pts[0], Sheet::Lower}, {pts[1], Sheet::Lower},
                                                    {pts[2], Sheet::Upper}, {pts[3], Sheet::Upper}, 1e-12);
            res = std::max(res, k.residual);
            anti = std::max(anti, k.antisymmetry);
            bil = std::max({bil, k.bilinear[0], k.bilinear[1]});
        } catch (const Error& e) {
            failure = e.what();
        }
    }
    return finish(5, "third-kind representation and bilinear relation",
                  {{"max_intrep_residual", res, 1e-8 * f}, {"max_bilinear_residual", bil, 1e-8 * f},
                   {"max_antisymmetry", anti, 1e-8 * f}},
                  t0, failure);
}

namespace {

struct E2E {
    int alpha = 0, beta = 0;
    double solve = 0, cs = 0, vert = 0, round = 0, seconds = 0;
    int points = 0;
    std::string failure;
};

Heptagon random_heptagon(Rng& r, int a, int b) {
    for (int attempt = 0; attempt < 500; ++attempt) {
        Mat2 om;
        om(0, 0) = uni(r, 0.8, 3.0);
        om(1, 1) = uni(r, 0.8, 3.0);
        om(0, 1) = om(1, 0) = uni(r, 0.15, 0.85) * std::min(om(0, 0), om(1, 1));
        try {
            const ForwardResult fr = forward_sides(om, uni(r, 0.08, 0.42), a, b);
            if (fr.violations.empty()) return fr.h;
        } catch (const Error&) {
        }
    }
    throw Error(ErrorCode::InvalidHeptagon, "no valid random heptagon for the class");
}

E2E run_heptagon(const Heptagon& h, std::uint64_t seed) {
    const auto t0 = Clock::now();
    E2E e;
    e.alpha = h.alpha;
    e.beta = h.beta;
    Rng r(seed);
    try {
        const MapParams p = solve_parameters(h);
        e.solve = equation_residuals(p, h).max();
        const ConformalMap cm(p);
        const Curve mc = oracle::curve_from_params(p);
        const VertexSet& v = cm.vertex_set();
        const auto vi = cm.vertex_images();
        for (int s = 0; s < 5; ++s) {
            const double Hs = ((vi[s] - vi[s + 1]) / ipow(s + 1)).real();
            e.vert = std::max(e.vert, std::fabs(Hs - h.H[s]));
        }
        for (int s = 0; s < 6; ++s) e.vert = std::max(e.vert, std::abs(vi[s] - v.w[s]));
        double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
        for (cplx w : v.w) {
            lo_x = std::min(lo_x, w.real());
            hi_x = std::max(hi_x, w.real());
            lo_y = std::min(lo_y, w.imag());
            hi_y = std::max(hi_y, w.imag());
        }
        hi_x += kPi;
        const double size = std::max(hi_x - lo_x, hi_y - lo_y);
        // CS values at random interior points against quadrature
        int got = 0;
        for (int tries = 0; got < 20 && tries < 20000; ++tries) {
            const cplx w(uni(r, lo_x, hi_x), uni(r, lo_y, hi_y));
            if (!contains(v, w) || boundary_distance(v, w) < 1e-3 * size) continue;
            const auto st = cm.solve_w(w);
            const cplx q = oracle::cs_by_quadrature(mc, p.alpha, p.beta, st.z, 1e-12);
            e.cs = std::max(e.cs, std::abs(q - w));
            ++got;
        }
        if (got < 20) throw Error(ErrorCode::NoConvergence, "too few interior sample points");
        // forward then inverse on a 10 x 10 mesh clipped to the heptagon
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const cplx w(lo_x + (i + 0.5) / 10 * (hi_x - lo_x), lo_y + (j + 0.5) / 10 * (hi_y - lo_y));
                if (!contains(v, w) || boundary_distance(v, w) < 1e-6 * size) continue;
                const cplx x = cm.to_halfplane(w);
                e.round = std::max(e.round, std::abs(cm.to_heptagon(x) - w));
                ++e.points;
            }
    } catch (const Error& err) {
        e.failure = err.what();
    }
    e.seconds = seconds_since(t0);
    return e;
}

}  // namespace

Check end_to_end(const Options& o) {
    const auto t0 = Clock::now();
    const double f = o.tol / 1e-9;
    Rng r(o.seed + 6);
    std::vector<Heptagon> hs;
    std::string failure;
    for (int a = 1; a <= 6; ++a)
        for (int b = a + 1; b <= 6; ++b)
            for (int k = 0; k < 5; ++k) {
                try {
                    hs.push_back(random_heptagon(r, a, b));
                } catch (const Error& e) {
                    failure = "(" + std::to_string(a) + "," + std::to_string(b) + "): " + e.what();
                }
            }
    std::vector<E2E> out(hs.size());
    std::atomic<std::size_t> next{0};
    const unsigned nt = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    std::mutex log_mu;
    auto worker = [&] {
        for (std::size_t k; (k = next++) < hs.size();) {
            out[k] = run_heptagon(hs[k], o.seed + 1000 + k);
            if (o.log) {
                std::lock_guard<std::mutex> lk(log_mu);
                const E2E& e = out[k];
                *o.log << "  heptagon " << k << " (" << e.alpha << "," << e.beta << ") solve=" << sci(e.solve)
                       << " cs=" << sci(e.cs) << " vertices=" << sci(e.vert) << " round_trip=" << sci(e.round)
                       << " points=" << e.points << " " << sci(e.seconds) << "s"
                       << (e.failure.empty() ? "" : " FAILED: " + e.failure) << "\n";
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(nt, hs.size()); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    double solve = 0, cs = 0, vert = 0, round = 0, secs = 0;
    int failed = 0;
    for (const E2E& e : out) {
        solve = std::max(solve, e.solve);
        cs = std::max(cs, e.cs);
        vert = std::max(vert, e.vert);
        round = std::max(round, e.round);
        secs = std::max(secs, e.seconds);
        if (!e.failure.empty()) {
            ++failed;
            if (failure.empty())
                failure = "(" + std::to_string(e.alpha) + "," + std::to_string(e.beta) + "): " + e.failure;
        }
    }
    return finish(6, "end-to-end mapping, 5 heptagons x 15 classes",
                  {{"heptagons", double(hs.size()), 75.0, false},
                   {"failed", double(failed), 0.0},
                   {"max_solver_residual", solve, 1e-9 * f},
                   {"max_cs_vs_quadrature", cs, 1e-8 * f},
                   {"max_vertex_side_err", vert, 1e-8 * f},
                   {"max_round_trip", round, 1e-8 * f},
                   {"max_seconds_per_heptagon", secs, 120.0}},
                  t0, failure);
}

Check humbert_edge(const Options& o) {
    (void)o;
    const auto t0 = Clock::now();
    const IntChar c = char_from_rows("11", "11");
    double prev = INFINITY, last = INFINITY;
    int increases = 0;
    for (int k = 0; k <= 30; ++k) {
        Mat2 om;
        const double b = 0.5 * std::pow(0.5, k);
        om << 2.0, b, b, 1.5;
        last = std::abs(theta_const(c, RiemannMatrix::from_omega(om)));
        if (!(last < prev)) ++increases;
        prev = last;
    }
    return finish(7, "Humbert edge: theta[11;11] as Omega12 -> 0",
                  {{"non_decreasing_steps", double(increases), 0.0}, {"final_value", last, 1e-6}}, t0);
}

Check conformality(const Options& o) {
    (void)o;
    const auto t0 = Clock::now();
    double worst = 0;
    int points = 0;
    std::string failure;
    try {
        Heptagon h;
        h.H = {5.0, 2.0, 1.0, 1.0, kPi - 4.0};
        std::vector<Heptagon> hs{h};
        Mat2 om;
        om << 2.0, 0.5, 0.5, 1.5;
        hs.push_back(forward_sides(om, 0.2, 2, 4).h);
        for (const Heptagon& hh : hs) {
            const ConformalMap cm(solve_parameters(hh));
            const VertexSet& v = cm.vertex_set();
            constexpr double d = 1e-3;
            for (int i = 0; i < 12; ++i)
                for (int j = 0; j < 12; ++j) {
                    double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
                    for (cplx w : v.w) {
                        lo_x = std::min(lo_x, w.real());
                        hi_x = std::max(hi_x, w.real() + 2.0);
                        lo_y = std::min(lo_y, w.imag());
                        hi_y = std::max(hi_y, w.imag());
                    }
                    const cplx w(lo_x + (i + 0.5) / 12 * (hi_x - lo_x), lo_y + (j + 0.5) / 12 * (hi_y - lo_y));
                    if (!contains(v, w) || boundary_distance(v, w) < 10 * d) continue;
                    const cplx t1 = cm.to_halfplane(w + d) - cm.to_halfplane(w - d);
                    const cplx t2 = cm.to_halfplane(w + kI * d) - cm.to_halfplane(w - kI * d);
                    worst = std::max(worst, std::fabs(std::arg(t2 / t1) - kPi / 2));
                    ++points;
                }
        }
    } catch (const Error& e) {
        failure = e.what();
    }
    return finish(8, "conformality of mesh images",
                  {{"max_angle_defect_rad", worst, 1e-3}, {"probe_points", double(points), 20.0, false}}, t0,
                  failure);
}

std::vector<Check> run_all(const Options& o) {
    std::vector<Check> out;
    for (auto fn : {theta_correctness, periods_and_aj, rosenhain_round_trip, divisor_and_projection, third_kind,
                    end_to_end, humbert_edge, conformality}) {
        out.push_back(fn(o));
        if (o.log) *o.log << format(out.back()) << std::flush;
    }
    return out;
}

std::string format(const Check& c) {
    std::ostringstream os;
    os << "criterion " << c.id << " " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << sci(c.seconds)
       << " s]\n";
    for (const auto& m : c.metrics) os << "    " << m << "\n";
    if (!c.failure.empty()) os << "    error: " << c.failure << "\n";
    return os.str();
}

}  // namespace hepta::selftest

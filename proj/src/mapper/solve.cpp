#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "heptamap/error.hpp"
#include "heptamap/mapper.hpp"

namespace hepta {

namespace {

const IntChar& c35() {
    static const IntChar c = char_from_indices({3, 5});
    return c;
}

IntChar c_s35(int s) { return char_from_indices({s, 3, 5}); }

ThetaOptions topt(double tol) {
    ThetaOptions o;
    o.tol = tol;
    return o;
}

// log-derivative of theta[c](u + u0) / theta[c](u - u0), best conditioned s in 2..6
CVec2 dlog_ratio(const CVec2& u, const CVec2& u0, const RiemannMatrix& rm, double tol) {
    double best = -1;
    CVec2 out = CVec2::Zero();
    for (int s = 2; s <= 6; ++s) {
        const RealChar c(c_s35(s));
        const ThetaEval p = theta_eval(c, u + u0, rm, topt(tol), true);
        const ThetaEval m = theta_eval(c, u - u0, rm, topt(tol), true);
        const double q = std::abs(p.value) / p.max_term * std::abs(m.value) / m.max_term;
        if (q > best) {
            best = q;
            out = p.grad / p.value - m.grad / m.value;
        }
    }
    return out;
}

bool in_cone(const Mat2& om) {
    return om(0, 1) > 0 && om(0, 1) < std::min(om(0, 0), om(1, 1));
}

struct Point4 {
    Mat2 omega;
    double u1;
};

Point4 unpack(const Eigen::Vector4d& x) {
    Point4 p;
    p.omega << x[0], x[1], x[1], x[2];
    p.u1 = x[3];
    return p;
}

Eigen::Vector4d pack(const Mat2& om, double u1) { return {om(0, 0), om(0, 1), om(1, 1), u1}; }

bool valid4(const Eigen::Vector4d& x) {
    return in_cone(unpack(x).omega) && x[3] > 1e-12 && x[3] < 0.5 - 1e-12;
}

Eigen::Vector4d sides4(const Heptagon& h) { return {h.H[0], h.H[1], h.H[3], h.H[4]}; }

Heptagon from4(const Eigen::Vector4d& s, int a, int b) {
    Heptagon h;
    h.alpha = a;
    h.beta = b;
    h.H = {s[0], s[1], s[0] + s[3] - kPi, s[2], s[3]};
    return h;
}

struct Solver {
    int alpha, beta;
    SolveReport* rep;
    bool left_region = false;

    bool eval(const Eigen::Vector4d& x, Eigen::Vector4d& g) {
        if (!valid4(x)) {
            left_region = true;
            return false;
        }
        if (rep) ++rep->forward_evaluations;
        try {
            const Point4 p = unpack(x);
            g = sides4(forward_sides(p.omega, p.u1, alpha, beta).h);
            return g.allFinite();
        } catch (const Error&) {
            return false;
        }
    }

    bool jacobian(const Eigen::Vector4d& x, Eigen::Matrix4d& J) {
        for (int k = 0; k < 4; ++k) {
            const double h = 1e-6 * std::max(std::fabs(x[k]), 0.05);
            Eigen::Vector4d xp = x, xm = x, gp, gm;
            xp[k] += h;
            xm[k] -= h;
            const bool okp = eval(xp, gp), okm = eval(xm, gm);
            if (okp && okm) {
                J.col(k) = (gp - gm) / (2 * h);
            } else {
                Eigen::Vector4d g0;
                if (!eval(x, g0)) return false;
                if (okp) J.col(k) = (gp - g0) / h;
                else if (okm) J.col(k) = (g0 - gm) / h;
                else return false;
            }
        }
        return J.allFinite();
    }

    // Newton with backtracking; returns the max-norm residual reached
    bool newton(Eigen::Vector4d& x, const Eigen::Vector4d& target, double tol, double accept,
                int max_it, double& res) {
        Eigen::Vector4d g;
        if (!eval(x, g)) return false;
        Eigen::Vector4d r = g - target;
        res = r.cwiseAbs().maxCoeff();
        for (int it = 0; it < max_it && res > tol; ++it) {
            if (rep) ++rep->newton_iterations;
            Eigen::Matrix4d J;
            if (!jacobian(x, J)) return false;
            Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
            if (!lu.isInvertible()) return false;
            const Eigen::Vector4d dx = lu.solve(-r);
            bool improved = false;
            for (double lam = 1.0; lam >= 1.0 / 64; lam *= 0.5) {
                const Eigen::Vector4d xt = x + lam * dx;
                Eigen::Vector4d gt;
                if (!eval(xt, gt)) continue;
                const Eigen::Vector4d rt = gt - target;
                const double rn = rt.cwiseAbs().maxCoeff();
                if (rn < res) {
                    x = xt;
                    r = rt;
                    res = rn;
                    improved = true;
                    break;
                }
            }
            if (!improved) return res <= accept;
        }
        return res <= accept;
    }
};

bool path_valid(const Eigen::Vector4d& s0, const Eigen::Vector4d& s1, int a, int b) {
    constexpr int kSamples = 200;
    for (int k = 1; k <= kSamples; ++k) {
        const double lam = double(k) / kSamples;
        if (!validate(from4(s0 + lam * (s1 - s0), a, b)).empty()) return false;
    }
    return true;
}

}  // namespace

double solve_u0_second(const Mat2& omega, double u1, double tol) {
    const RiemannMatrix rm = RiemannMatrix::from_omega(omega);
    auto f = [&](double u2) {
        return theta_eval(RealChar(c35()), CVec2(u1, u2), rm, topt(1e-15), false).value.real();
    };
    const double fa = f(0.0), fb = f(0.5);
    if (fa == 0.0) return 0.0;
    if (fb == 0.0) return 0.5;
    if ((fa > 0) == (fb > 0))
        throw Error(ErrorCode::NoRootInBracket, "theta[35](u1, .) has no sign change on [0, 1/2]");
    std::uintmax_t it = 200;
    const int bits = std::max(20, int(-std::log2(std::max(tol, 1e-16))));
    auto r = boost::math::tools::toms748_solve(f, 0.0, 0.5, fa, fb,
                                               boost::math::tools::eps_tolerance<double>(bits), it);
    return 0.5 * (r.first + r.second);
}

Vec2 solve_C(const Mat2& omega, const Vec2& u0, int alpha, int beta, double tol) {
    if (!(1 <= alpha && alpha < beta && beta <= 6))
        throw Error(ErrorCode::BadLabel, "alpha, beta");
    const RiemannMatrix rm = RiemannMatrix::from_omega(omega);
    const CVec2 cu0 = u0.cast<cplx>();
    CMat2 M;
    CVec2 rhs;
    const int g[2] = {alpha, beta};
    for (int r = 0; r < 2; ++r) {
        const CVec2 u = boundary_half_period(g[r], omega);
        const ThetaEval t = theta_eval(RealChar(c35()), u, rm, topt(tol), true);
        const CVec2 dF = dlog_ratio(u, cu0, rm, tol);
        const double sc = std::abs(t.grad[0]) + std::abs(t.grad[1]);
        M(r, 0) = -t.grad[1] / sc;
        M(r, 1) = t.grad[0] / sc;
        rhs[r] = (t.grad[1] * dF[0] - t.grad[0] * dF[1]) / sc;
    }
    const cplx det = M.determinant();
    if (!(std::abs(det) > 1e-12))
        throw Error(ErrorCode::SingularSystem, "wedge system for C is singular");
    const CVec2 C = M.inverse() * rhs;
    if (!C.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite C");
    return {C[0].real(), C[1].real()};
}

ForwardResult forward_sides(const Mat2& omega, double u1, int alpha, int beta, double tol) {
    if (!in_cone(omega)) throw Error(ErrorCode::ConeViolation, "Omega outside 0 < Omega12 < min");
    if (!(u1 > 0 && u1 < 0.5)) throw Error(ErrorCode::ConeViolation, "u1 outside (0, 1/2)");
    ForwardResult r;
    r.u0 = Vec2(u1, solve_u0_second(omega, u1));
    r.C = solve_C(omega, r.u0, alpha, beta, tol);
    MapParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.omega = omega;
    p.u0 = r.u0;
    p.C = r.C;
    r.h = heptagon_of(p);
    r.violations = validate(r.h);
    return r;
}

MapParams solve_parameters(const Heptagon& h, const SolveOptions& opt, SolveReport* report) {
    const auto bad = validate(h);
    if (!bad.empty()) throw Error(ErrorCode::InvalidHeptagon, bad.front().rule + " (" + bad.front().detail + ")");
    const int a = h.alpha, b = h.beta;
    const Eigen::Vector4d target = sides4(h);
    const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());

    // continuation start: the reference point, then alternatives whose straight side path stays valid
    std::vector<Eigen::Vector4d> starts{pack(opt.omega0, opt.u1_0)};
    for (double d1 : {0.7, 1.5, 3.0})
        for (double d2 : {0.7, 1.5, 3.0})
            for (double off : {0.2, 0.5, 0.8})
                for (double u1 : {0.1, 0.2, 0.3, 0.4}) {
                    Mat2 om;
                    om << d1, off * std::min(d1, d2), off * std::min(d1, d2), d2;
                    starts.push_back(pack(om, u1));
                }
    Eigen::Vector4d x0, s0;
    bool found = false;
    double best = INFINITY;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        Point4 p = unpack(starts[k]);
        ForwardResult fr;
        try {
            fr = forward_sides(p.omega, p.u1, a, b);
        } catch (const Error&) {
            continue;
        }
        if (!fr.violations.empty()) continue;
        const Eigen::Vector4d s = sides4(fr.h);
        if (!path_valid(s, target, a, b)) continue;
        const double d = (s - target).norm();
        if (k == 0 || d < best) {
            best = d;
            x0 = starts[k];
            s0 = s;
            found = true;
            if (k == 0) break;
        }
    }
    if (!found) throw Error(ErrorCode::ContinuationStalled, "no valid continuation start");

    Solver sv{a, b, report};
    if (report) {
        *report = SolveReport{};
        report->start_omega = unpack(x0).omega;
        report->start_u1 = x0[3];
    }
    Eigen::Vector4d x = x0;
    double lam = 0, dlam = 1;
    const double step_tol = 1e-7 * scale, final_tol = 1e-12 * scale;
    while (lam < 1) {
        const double ln = std::min(1.0, lam + dlam);
        const Eigen::Vector4d tg = s0 + ln * (target - s0);
        Eigen::Vector4d xt = x;
        double res = INFINITY;
        const bool last = ln >= 1.0;
        const bool ok = sv.newton(xt, tg, last ? final_tol : step_tol,
                                  last ? opt.tol : 1e-4 * scale, opt.max_newton, res);
        if (ok) {
            x = xt;
            lam = ln;
            dlam = std::min(2 * dlam, 1.0);
            if (report) ++report->continuation_steps;
        } else {
            dlam *= 0.5;
            if (dlam < 1e-6) {
                if (sv.left_region)
                    throw Error(ErrorCode::LeftValidRegion,
                                "continuation left the parameter cone at lambda " + std::to_string(lam));
                throw Error(ErrorCode::ContinuationStalled,
                            "continuation stalled at lambda " + std::to_string(lam));
            }
        }
    }
    const Point4 p = unpack(x);
    const ForwardResult fr = forward_sides(p.omega, p.u1, a, b);
    MapParams mp;
    mp.alpha = a;
    mp.beta = b;
    mp.omega = p.omega;
    mp.u0 = fr.u0;
    mp.C = fr.C;
    mp.residual = (sides4(fr.h) - target).cwiseAbs().maxCoeff();
    if (!(mp.residual <= opt.tol))
        throw Error(ErrorCode::NoConvergence, "side residual " + std::to_string(mp.residual));
    return mp;
}

double EquationResiduals::max() const {
    double m = divisor;
    for (double v : sides) m = std::max(m, v);
    for (double v : wedge) m = std::max(m, v);
    return m;
}

Heptagon heptagon_of(const MapParams& p) {
    const double C1 = p.C[0], C2 = p.C[1];
    const Mat2& om = p.omega;
    Heptagon h;
    h.alpha = p.alpha;
    h.beta = p.beta;
    h.H[0] = 0.5 * (C1 * om(0, 0) + C2 * om(0, 1) + 2 * kPi * (1 - 2 * p.u0[0]));
    h.H[1] = 0.5 * C1;
    h.H[3] = -0.5 * C2;
    h.H[4] = -0.5 * (C1 * om(0, 1) + C2 * om(1, 1) - 4 * kPi * p.u0[1]);
    h.H[2] = h.H[0] + h.H[4] - kPi;
    return h;
}

EquationResiduals equation_residuals(const MapParams& p, const Heptagon& h) {
    EquationResiduals e;
    const Mat2& om = p.omega;
    const Heptagon hp = heptagon_of(p);
    for (int k = 0, s = 0; s < 5; ++s)
        if (s != 2) e.sides[k++] = std::fabs(hp.H[s] - h.H[s]);
    const RiemannMatrix rm = RiemannMatrix::from_omega(om);
    const CVec2 cu0 = p.u0.cast<cplx>();
    const ThetaEval t0 = theta_eval(RealChar(c35()), cu0, rm, topt(1e-15), false);
    e.divisor = std::abs(t0.value) / t0.max_term;
    const int g[2] = {p.alpha, p.beta};
    for (int r = 0; r < 2; ++r) {
        const CVec2 u = boundary_half_period(g[r], om);
        const ThetaEval t = theta_eval(RealChar(c35()), u, rm, topt(1e-15), true);
        const CVec2 dw = dlog_ratio(u, cu0, rm, 1e-15) + p.C.cast<cplx>();
        const cplx wedge = t.grad[0] * dw[1] - t.grad[1] * dw[0];
        e.wedge[r] = std::abs(wedge) / (t.grad.norm() * std::max(1.0, dw.norm()));
    }
    return e;
}

}  // namespace hepta

#include <algorithm>
#include <cmath>

#include "heptamap/error.hpp"
#include "heptamap/mapper.hpp"

namespace hepta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ThetaOptions topt() {
    ThetaOptions o;
    o.tol = 1e-15;
    return o;
}

const IntChar& c35() {
    static const IntChar c = char_from_indices({3, 5});
    return c;
}

double cnorm(const CVec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

// Newton step for [f1; f2] with rows g1, g2
bool solve2(const CVec2& g1, const CVec2& g2, cplx f1, cplx f2, CVec2& d) {
    const cplx det = g1[0] * g2[1] - g1[1] * g2[0];
    const double sc = cnorm(g1) * cnorm(g2);
    if (!(std::abs(det) > 1e-14 * sc)) return false;
    d[0] = (f1 * g2[1] - f2 * g1[1]) / det;
    d[1] = (g1[0] * f2 - g2[0] * f1) / det;
    return true;
}

}  // namespace

ConformalMap::ConformalMap(const MapParams& p, MapOptions opt)
    : p_(p),
      opt_(opt),
      h_(heptagon_of(p)),
      verts_(vertices(h_)),
      rm_(RiemannMatrix::from_omega(p.omega)) {
    for (int v = 0; v < 2; ++v) {
        const Norm n{1, 2, 6, 3 + v};
        kappa_[v] = Projection(p.omega, n).constant();
        zn_[v] = char_from_indices({n.s, n.k, 3, 5});
        zd_[v] = char_from_indices({n.l, n.k, 3, 5});
    }
    ros_ = rosenhain(p.omega);
    x0_ = Projection(p.omega, Norm{}).operator()(p.u0.cast<cplx>()).real();
    if (!(x0_ < 0)) throw Error(ErrorCode::SignCheckFailed, "marked point off the third oval");
    const double xr[6] = {0.0, 1.0, ros_[0], ros_[1], ros_[2], kInf};
    for (int s = 0; s < 6; ++s) zs_[s] = std::isinf(xr[s]) ? 0.0 : 1.0 / (x0_ - xr[s]);
    zscale_ = -zs_[0];
    zgap_ = zscale_;
    for (int s = 0; s < 5; ++s) zgap_ = std::min(zgap_, zs_[s + 1] - zs_[s]);
    build_seeds();
}

ThetaEval ConformalMap::theta35(const CVec2& u) const {
    return theta_eval(RealChar(c35()), u, rm_, topt(), true);
}

ConformalMap::LogRatio ConformalMap::log_ratio(const CVec2& u, bool grad, int hint) const {
    const CVec2 u0 = p_.u0.cast<cplx>();
    LogRatio best{};
    double bq = -1;
    auto try_char = [&](int s) {
        const RealChar c(char_from_indices({s, 3, 5}));
        const ThetaEval a = theta_eval(c, u + u0, rm_, topt(), grad);
        const ThetaEval b = theta_eval(c, u - u0, rm_, topt(), grad);
        const double q = std::abs(a.value) / a.max_term * std::abs(b.value) / b.max_term;
        if (q > bq) {
            bq = q;
            best.R = a.value / b.value;
            best.dlog = grad ? CVec2(a.grad / a.value - b.grad / b.value) : CVec2::Zero();
            best.ch = s;
        }
        return q;
    };
    if (hint >= 2 && hint <= 6 && try_char(hint) > 1e-3) return best;
    for (int s = 2; s <= 6; ++s)
        if (s != hint) try_char(s);
    if (!(std::abs(best.R) > 0) || !std::isfinite(std::abs(best.R)))
        throw Error(ErrorCode::AtPole, "CS integral is singular at this point");
    return best;
}

cplx ConformalMap::w_principal(const CVec2& u, const LogRatio& lr) const {
    return p_.anchor + std::log(-lr.R) + p_.C[0] * u[0] + p_.C[1] * u[1];
}

cplx ConformalMap::z_of_u(const CVec2& u, CVec2* grad) const {
    // both quotients vanish to second order at their own p_k; use the better one
    ThetaEval A[2], B[2];
    double q[2];
    for (int v = 0; v < 2; ++v) {
        A[v] = theta_eval(RealChar(zn_[v]), u, rm_, topt(), grad != nullptr);
        B[v] = theta_eval(RealChar(zd_[v]), u, rm_, topt(), grad != nullptr);
        q[v] = std::max(std::abs(A[v].value) / A[v].max_term, std::abs(B[v].value) / B[v].max_term);
    }
    const int v = q[1] > q[0] ? 1 : 0;
    const cplx a = A[v].value, b = B[v].value;
    const double k = kappa_[v];
    const cplx den = x0_ * b * b - k * a * a;
    const double sc = std::max(std::abs(x0_) * std::norm(b), k * std::norm(a));
    if (!(std::abs(den) > 1e-15 * sc)) throw Error(ErrorCode::AtPole, "marked point");
    if (grad) *grad = 2.0 * k * a * b * (b * A[v].grad - a * B[v].grad) / (den * den);
    return b * b / den;
}

Mobius ConformalMap::norm_map(const Norm& n) const {
    const double xr[6] = {0.0, 1.0, ros_[0], ros_[1], ros_[2], kInf};
    for (int v : {n.s, n.j, n.l, n.k})
        if (v < 1 || v > 6) throw Error(ErrorCode::BadLabel, "normalization label");
    if (n.s == n.j || n.s == n.l || n.j == n.l || n.k == n.s || n.k == n.j || n.k == n.l)
        throw Error(ErrorCode::BadLabel, "normalization labels must be distinct");
    const Mobius m = Mobius::from_three(xr[n.s - 1], xr[n.j - 1], xr[n.l - 1]);
    if (!(m.a * m.d - m.b * m.c > 0))
        throw Error(ErrorCode::BadLabel, "normalization s, j, l must follow the boundary order");
    return m;
}

double ConformalMap::branch_image(int s, const Norm& norm) const {
    if (s < 1 || s > 6) throw Error(ErrorCode::BadLabel, "branch label");
    const double xr[6] = {0.0, 1.0, ros_[0], ros_[1], ros_[2], kInf};
    return norm_map(norm)(xr[s - 1]);
}

cplx ConformalMap::x_to_z(cplx x, const Norm& norm) const {
    const Mobius m = norm_map(norm).inverse();
    // x_R = m(x); z = 1 / (x0 - x_R) written without dividing by c x + d
    const bool inf = std::isinf(x.real()) || std::isinf(x.imag());
    const cplx num = inf ? cplx(m.c) : m.c * x + m.d;
    const cplx den = inf ? cplx(x0_ * m.c - m.a) : x0_ * num - (m.a * x + m.b);
    if (std::abs(den) == 0.0) throw Error(ErrorCode::AtPole, "preimage of the channel");
    return num / den;
}

cplx ConformalMap::z_to_x(cplx z, const Norm& norm) const {
    const Mobius m = norm_map(norm);
    // x_R = (x0 z - 1) / z
    const cplx num = m.a * (x0_ * z - 1.0) + m.b * z;
    const cplx den = m.c * (x0_ * z - 1.0) + m.d * z;
    if (std::abs(den) == 0.0) return {kInf, 0.0};
    return num / den;
}

bool ConformalMap::in_hplus_closure(const CVec2& u, double tol) const {
    const RealChar rc = char_of(u, p_.omega);
    for (int k = 0; k < 2; ++k) {
        if (rc.eps[k] < -1 - tol || rc.eps[k] > tol) return false;
        if (rc.epsp[k] < -tol || rc.epsp[k] > 1 + tol) return false;
    }
    return true;
}

ConformalMap::State ConformalMap::start_state() const {
    const ThetaEval t0 = theta35(CVec2::Zero());
    CVec2 T(-t0.grad[1], t0.grad[0]);
    const cplx ph = std::abs(T[0]) > std::abs(T[1]) ? T[0] / std::abs(T[0]) : T[1] / std::abs(T[1]);
    Vec2 Tr((T[0] / ph).real(), (T[1] / ph).real());
    if (Tr[0] < 0) Tr = -Tr;
    Tr /= Tr.norm();
    if (!(Tr[0] > 0 && Tr[1] > 0))
        throw Error(ErrorCode::SignCheckFailed, "divisor tangent at p1 leaves the positive quadrant");
    constexpr double h = 1e-3;
    CVec2 u = cplx(h, -h) * Tr.cast<cplx>();
    for (int it = 0; it < 8; ++it) {
        const ThetaEval t = theta35(u);
        const double g2 = std::norm(t.grad[0]) + std::norm(t.grad[1]);
        const CVec2 d = t.value * t.grad.conjugate() / g2;
        u -= d;
        if (cnorm(d) < 1e-16) break;
    }
    if (!in_hplus_closure(u, 0.0))
        throw Error(ErrorCode::WrongTile, "start point outside the H+ tile");
    State s;
    s.u = u;
    s.z = z_of_u(u);
    if (!(s.z.imag() > 0)) throw Error(ErrorCode::SignCheckFailed, "start point below the real axis");
    const LogRatio lr = log_ratio(u, false, 0);
    s.R = lr.R;
    s.ch = lr.ch;
    s.w = w_principal(u, lr);
    return s;
}

bool ConformalMap::newton(State& s, const State& from, cplx target, bool in_w) const {
    try {
    const double usc = 1 + cnorm(s.u);
    double prev = kInf, best_res = kInf;
    CVec2 best_u = s.u;
    for (int it = 0; it < 40; ++it) {
        const ThetaEval t = theta35(s.u);
        const double gn = cnorm(t.grad);
        CVec2 g2;
        cplx f2;
        LogRatio lr{};
        if (in_w) {
            lr = log_ratio(s.u, true, s.ch);
            g2 = lr.dlog + p_.C.cast<cplx>();
            f2 = from.w + std::log(lr.R / from.R) + p_.C.cast<cplx>().dot(s.u - from.u) - target;
        } else {
            f2 = z_of_u(s.u, &g2) - target;
        }
        const double res = std::abs(t.value) / gn + std::abs(f2) / (in_w ? 1 + std::abs(target) : zscale_);
        if (res < best_res) {
            best_res = res;
            best_u = s.u;
        }
        CVec2 d;
        if (!solve2(t.grad / gn, g2, t.value / gn, f2, d)) return false;
        s.u -= d;
        if (!s.u.allFinite()) return false;
        const double dn = cnorm(d);
        // converged, or no longer shrinking at the rounding floor near a branch point,
        // where the smallest-residual iterate beats the last noisy step
        const bool floor = it >= 2 && dn >= prev && dn < 1e-9 * usc;
        if (floor) s.u = best_u;
        if (dn <= 1e-14 * usc || floor) {
            const LogRatio fin = log_ratio(s.u, false, in_w ? lr.ch : s.ch);
            s.R = fin.R;
            s.ch = fin.ch;
            // the walked value only fixes the branch; the principal value carries the digits
            const cplx walked = from.w + std::log(s.R / from.R) + p_.C.cast<cplx>().dot(s.u - from.u);
            const cplx w0 = w_principal(s.u, fin);
            s.w = w0 + cplx(0, 2 * kPi * std::round((walked - w0).imag() / (2 * kPi)));
            s.z = z_of_u(s.u);
            return true;
        }
        if (dn > 0.5 * usc) return false;
        prev = dn;
    }
    return false;
    } catch (const Error&) {
        return false;
    }
}

ConformalMap::State ConformalMap::walk(const State& from, cplx target, bool in_w) const {
    const cplx start = in_w ? from.w : from.z;
    const double len = std::abs(target - start);
    State cur = from;
    double t = 0, dt = 1;
    const double min_dt = 1e-13 * (1 + std::abs(target)) / std::max(len, 1e-300);
    while (t < 1) {
        const double tn = std::min(1.0, t + dt);
        const cplx pt = target + (1 - tn) * (start - target);  // exact at tn = 1
        // predictor from the tangent of the divisor at the current point
        const ThetaEval th = theta35(cur.u);
        CVec2 g2;
        if (in_w) g2 = log_ratio(cur.u, true, cur.ch).dlog + p_.C.cast<cplx>();
        else z_of_u(cur.u, &g2);
        const cplx cv = in_w ? cur.w : cur.z;
        CVec2 du;
        State nx = cur;
        bool ok = solve2(th.grad, g2, 0.0, -(pt - cv), du);
        if (ok) {
            nx.u = cur.u - du;
            const CVec2 pred = nx.u;
            ok = newton(nx, cur, pt, in_w);
            if (ok) {
                const double step = cnorm(pred - cur.u);
                ok = cnorm(nx.u - pred) <= 0.25 * step + 1e-12 &&
                     std::fabs(std::arg(nx.R / cur.R)) < 1.0 && in_hplus_closure(nx.u, 1e-7);
            }
        }
        if (ok) {
            cur = nx;
            t = tn;
            dt = std::min(2 * dt, 1.0);
        } else {
            dt *= 0.5;
            if (dt < min_dt) throw Error(ErrorCode::NoConvergence, "continuation along the divisor stalled");
        }
    }
    return cur;
}

ConformalMap::State ConformalMap::walk_polyline(const State& from, const std::vector<cplx>& path) const {
    State s = from;
    for (cplx p : path) s = walk(s, p, true);
    return s;
}

void ConformalMap::build_seeds() {
    seeds_.clear();
    seeds_.push_back(start_state());
    const double L = zscale_;
    const cplx c(0.5 * (zs_[0] + zs_[5]), 0.0);
    std::vector<cplx> tg;
    for (int s = 0; s < 6; ++s) {
        double g = kInf;
        if (s > 0) g = std::min(g, zs_[s] - zs_[s - 1]);
        if (s < 5) g = std::min(g, zs_[s + 1] - zs_[s]);
        tg.emplace_back(zs_[s], 0.25 * g);
    }
    for (int s = 0; s < 5; ++s) tg.emplace_back(0.5 * (zs_[s] + zs_[s + 1]), 0.3 * (zs_[s + 1] - zs_[s]));
    tg.push_back(cplx(zs_[0] - 0.5 * L, 0.5 * L));
    tg.push_back(cplx(zs_[5] + 0.5 * L, 0.5 * L));
    tg.push_back(c + cplx(0, L));
    tg.push_back(c + cplx(0, 3 * L));
    for (double k : {2.0, 4.0, 7.0}) tg.push_back(c + cplx(0, L * std::exp(k)));
    for (double r : {0.7, 2.0, 6.0, 30.0})
        for (double deg : {30.0, 150.0, 60.0, 120.0}) tg.push_back(c + L * r * std::polar(1.0, deg * kPi / 180));
    const std::size_t n = std::max<std::size_t>(0, opt_.seeds > 0 ? opt_.seeds : 0);
    for (std::size_t k = 0; k < tg.size() && k < n; ++k) {
        try {
            seeds_.push_back(walk(nearest_seed_z(tg[k]), tg[k], false));
        } catch (const Error&) {
        }
    }
}

const ConformalMap::State& ConformalMap::nearest_seed_z(cplx z) const {
    const State* best = &seeds_.front();
    double bd = kInf;
    for (const State& s : seeds_) {
        const double d = std::abs(s.z - z) / (s.z.imag() + std::max(z.imag(), 0.0));
        if (d < bd) {
            bd = d;
            best = &s;
        }
    }
    return *best;
}

ConformalMap::State ConformalMap::solve_z(cplx z) const {
    if (z.imag() < -1e-14 * zscale_) throw Error(ErrorCode::OutsideHalfPlane, "point below the real axis");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(ErrorCode::AtPole, "preimage of the channel");
    return walk(nearest_seed_z(z), z, false);
}

ConformalMap::State ConformalMap::solve_w(cplx w) const {
    const double sc = 1 + std::abs(w);
    if (!contains(verts_, w, 1e-12 * sc)) throw Error(ErrorCode::OutsideHeptagon, "point outside the heptagon");
    std::vector<const State*> order;
    for (const State& s : seeds_) order.push_back(&s);
    std::stable_sort(order.begin(), order.end(),
                     [&](const State* a, const State* b) { return std::abs(a->w - w) < std::abs(b->w - w); });
    for (const State* s : order) {
        const cplx a = s->w;
        const std::vector<std::vector<cplx>> paths{
            {w}, {cplx(w.real(), a.imag()), w}, {cplx(a.real(), w.imag()), w}};
        for (const auto& path : paths) {
            bool inside = true;
            cplx prev = a;
            for (cplx q : path) {
                inside = inside && segment_inside(verts_, prev, q, 1e-12 * sc);
                prev = q;
            }
            if (!inside) continue;
            try {
                State r = walk_polyline(*s, path);
                if (!in_hplus_closure(r.u, 1e-7)) throw Error(ErrorCode::WrongTile, "solution outside H+");
                return r;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoConvergence && e.code() != ErrorCode::WrongTile) throw;
            }
        }
    }
    throw Error(ErrorCode::NoConvergence, "no seed reaches the point");
}

cplx ConformalMap::to_halfplane(cplx w, const Norm& norm) const {
    norm_map(norm);  // rejects bad labels before any work
    for (int s = 0; s < 6; ++s)
        if (std::abs(w - verts_.w[s]) <= 1e-10 * (1 + std::abs(w))) return branch_image(s + 1, norm);
    const cplx x = z_to_x(solve_w(w).z, norm);
    // the boundary maps onto the real axis
    if (boundary_distance(verts_, w) <= 1e-12 * (1 + std::abs(w))) return {x.real(), 0.0};
    return x;
}

cplx ConformalMap::to_heptagon(cplx x, const Norm& norm) const {
    const cplx z = x_to_z(x, norm);
    for (int s = 0; s < 6; ++s)
        if (std::abs(z - zs_[s]) <= 1e-14 * zscale_) return verts_.w[s];
    return solve_z(z).w;
}

cplx ConformalMap::cs_value(const CVec2& u) const {
    RealChar rc = char_of(u, p_.omega);
    constexpr double slack = 1e-9;
    for (int k = 0; k < 2; ++k) {
        rc.eps[k] -= 2 * std::floor((rc.eps[k] + 1 + slack) / 2);
        rc.epsp[k] -= 2 * std::ceil((rc.epsp[k] - 1 - slack) / 2);
    }
    const CVec2 ur = point_of(rc, p_.omega);
    if (!in_hplus_closure(ur, 1e-9)) throw Error(ErrorCode::WrongTile, "point outside the closed H+ tile");
    const CVec2 u0 = p_.u0.cast<cplx>();
    if (lattice_distance(ur, u0, p_.omega) < 1e-10 || lattice_distance(ur, -u0, p_.omega) < 1e-10)
        throw Error(ErrorCode::AtPole, "u at the pole of the CS integral");
    const LogRatio lr = log_ratio(ur, false, 0);
    const cplx w0 = w_principal(ur, lr);
    const cplx z = z_of_u(ur);
    // approach from above until the walked value pins the branch of the logarithm
    double eps = 1e-3 * zgap_;
    cplx zt(z.real(), std::max(z.imag(), eps));
    State s = walk(nearest_seed_z(zt), zt, false);
    for (int pass = 0; pass < 6; ++pass) {
        const cplx d = s.w - w0;
        const double k = std::round(d.imag() / (2 * kPi));
        if (std::abs(d - cplx(0, 2 * kPi * k)) < 0.5 || zt.imag() <= z.imag()) return w0 + cplx(0, 2 * kPi * k);
        eps *= 1e-2;
        zt = cplx(z.real(), std::max(z.imag(), eps));
        s = walk(s, zt, false);
    }
    throw Error(ErrorCode::NoConvergence, "branch of the CS logarithm not resolved");
}

std::array<cplx, 6> ConformalMap::vertex_images() const {
    std::array<cplx, 6> out;
    for (int s = 1; s <= 6; ++s) out[s - 1] = cs_value(boundary_half_period(s, p_.omega));
    return out;
}

}  // namespace hepta

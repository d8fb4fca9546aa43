#include "heptamap/heptagon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heptamap/error.hpp"

namespace hepta {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double seg_distance(cplx p, cplx a, cplx b) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    double t = len2 > 0 ? ((p - a) * std::conj(d)).real() / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// parameters t in [0,1] where segment a-b meets segment c-d
void intersections(cplx a, cplx b, cplx c, cplx d, std::vector<double>& ts) {
    const cplx r = b - a, s = d - c;
    const double den = cross(r, s);
    if (std::fabs(den) < 1e-300) {
        // parallel: collinear overlap contributes the endpoints of the overlap
        if (std::fabs(cross(c - a, r)) > 1e-12 * (std::abs(r) + std::abs(c - a))) return;
        const double rr = std::norm(r);
        if (rr == 0) return;
        for (cplx p : {c, d}) {
            const double t = ((p - a) * std::conj(r)).real() / rr;
            if (t > 0 && t < 1) ts.push_back(t);
        }
        return;
    }
    const double t = cross(c - a, s) / den;
    const double u = cross(c - a, r) / den;
    if (t >= 0 && t <= 1 && u >= -1e-14 && u <= 1 + 1e-14) ts.push_back(t);
}

}  // namespace

std::vector<Violation> validate(const Heptagon& h, double tol) {
    std::vector<Violation> out;
    const int a = h.alpha, b = h.beta;
    if (!(1 <= a && a < b && b <= 6)) {
        out.push_back({"indices: 1<=alpha<beta<=6", std::to_string(a) + "," + std::to_string(b)});
        return out;
    }
    const auto& H = h.H;
    double hmax = 1.0;
    for (double v : H) {
        if (!std::isfinite(v)) {
            out.push_back({"finite: H", num(v)});
            return out;
        }
        hmax = std::max(hmax, std::fabs(v));
    }
    const double sum = H[0] - H[2] + H[4];
    if (std::fabs(sum - kPi) > tol * hmax) out.push_back({"sum: H1-H3+H5=pi", num(sum)});
    for (int s = 1; s <= 5; ++s) {
        const double f = (s + 0.5 - a) * (s + 0.5 - b);
        if (!(f * H[s - 1] > 0)) {
            const std::string id = "sign: H" + std::to_string(s) + (f > 0 ? ">0" : "<0");
            out.push_back({id, num(H[s - 1])});
        }
    }
    const double d24 = -H[1] + H[3], d13 = H[0] - H[2], d35 = -H[2] + H[4];
    auto row = [&](int ra, int rb) { return a == ra && b == rb; };
    if (row(1, 2) && !(d24 > 0)) out.push_back({"(1,2): -H2+H4>0", num(d24)});
    if (row(1, 5) && d13 <= 0 && !(d24 > 0))
        out.push_back({"(1,5): -H2+H4>0 when H1-H3<=0", num(d24)});
    if (row(2, 3) && !(d35 > 0)) out.push_back({"(2,3): -H3+H5>0", num(d35)});
    if (row(2, 6) && d35 <= 0 && !(d24 < 0))
        out.push_back({"(2,6): -H2+H4<0 when -H3+H5<=0", num(d24)});
    if (row(4, 5) && !(d13 > 0)) out.push_back({"(4,5): H1-H3>0", num(d13)});
    if (row(5, 6) && !(d24 < 0)) out.push_back({"(5,6): -H2+H4<0", num(d24)});
    return out;
}

VertexSet vertices(const Heptagon& h) {
    const auto bad = validate(h);
    if (!bad.empty()) throw Error(ErrorCode::InvalidHeptagon, bad.front().rule);
    VertexSet v;
    v.w[0] = cplx(0.0, kPi);
    for (int s = 1; s <= 5; ++s) v.w[s] = v.w[s - 1] - ipow(s) * h.H[s - 1];
    return v;
}

Heptagon reflect(const Heptagon& h) {
    Heptagon r;
    r.alpha = 7 - h.beta;
    r.beta = 7 - h.alpha;
    for (int s = 0; s < 5; ++s) r.H[s] = h.H[4 - s];
    return r;
}

double channel_cut(const VertexSet& v, double extra_re) {
    double lo = v.w[0].real(), hi = lo, ylo = v.w[0].imag(), yhi = ylo;
    for (cplx w : v.w) {
        lo = std::min(lo, w.real());
        hi = std::max(hi, w.real());
        ylo = std::min(ylo, w.imag());
        yhi = std::max(yhi, w.imag());
    }
    return std::max(hi, extra_re) + (hi - lo) + (yhi - ylo) + 1.0;
}

std::vector<cplx> outline(const VertexSet& v, double far) {
    std::vector<cplx> p(v.w.begin(), v.w.end());
    p.emplace_back(far, v.w[5].imag());
    p.emplace_back(far, v.w[0].imag());
    return p;
}

double boundary_distance(const VertexSet& v, cplx w) {
    const auto p = outline(v, channel_cut(v, w.real()));
    double d = INFINITY;
    for (std::size_t k = 0; k < p.size(); ++k) {
        // the cut edge is not part of the boundary
        if (k == 6) continue;
        d = std::min(d, seg_distance(w, p[k], p[(k + 1) % p.size()]));
    }
    return d;
}

bool contains(const VertexSet& v, cplx w, double tol) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
    if (boundary_distance(v, w) <= tol) return true;
    const auto p = outline(v, channel_cut(v, w.real()));
    bool inside = false;
    for (std::size_t k = 0, j = p.size() - 1; k < p.size(); j = k++) {
        const cplx a = p[k], b = p[j];
        if ((a.imag() > w.imag()) != (b.imag() > w.imag())) {
            const double x = a.real() + (w.imag() - a.imag()) * (b.real() - a.real()) /
                                            (b.imag() - a.imag());
            if (w.real() < x) inside = !inside;
        }
    }
    return inside;
}

bool segment_inside(const VertexSet& v, cplx a, cplx b, double tol) {
    if (!contains(v, a, tol) || !contains(v, b, tol)) return false;
    const auto p = outline(v, channel_cut(v, std::max(a.real(), b.real())));
    std::vector<double> ts{0.0, 1.0};
    for (std::size_t k = 0; k < p.size(); ++k) intersections(a, b, p[k], p[(k + 1) % p.size()], ts);
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        if (ts[k + 1] - ts[k] < 1e-15) continue;
        if (!contains(v, a + 0.5 * (ts[k] + ts[k + 1]) * (b - a), tol)) return false;
    }
    return true;
}

}  // namespace hepta

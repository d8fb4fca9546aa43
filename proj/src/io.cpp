#include "heptamap/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "heptamap/error.hpp"

namespace hepta::io {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

double num(const json& j, const char* what) {
    if (!j.is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " must be a number");
    return j.get<double>();
}

int integer(const json& j, const char* what) {
    if (!j.is_number_integer()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an integer");
    return j.get<int>();
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field ") + key);
    return j.at(key);
}

std::vector<double> vec(const json& j, std::size_t n, const char* what) {
    if (!j.is_array() || j.size() != n)
        throw Error(ErrorCode::ParseError, std::string(what) + " must have " + std::to_string(n) + " entries");
    std::vector<double> v;
    for (const json& e : j) v.push_back(num(e, what));
    return v;
}

double to_double(const std::string& s) {
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
    return v;
}

}  // namespace

Heptagon parse_heptagon(const std::string& text) {
    const json j = parse_json(text);
    Heptagon h;
    h.alpha = integer(field(j, "alpha"), "alpha");
    h.beta = integer(field(j, "beta"), "beta");
    const auto H = vec(field(j, "H"), 5, "H");
    std::copy(H.begin(), H.end(), h.H.begin());
    return h;
}

Heptagon read_heptagon(const std::string& path) { return parse_heptagon(slurp(path)); }

std::string heptagon_json(const Heptagon& h) {
    json j;
    j["alpha"] = h.alpha;
    j["beta"] = h.beta;
    j["H"] = h.H;
    return j.dump(2) + "\n";
}

MapParams parse_params(const std::string& text) {
    const json j = parse_json(text);
    MapParams p;
    p.alpha = integer(field(j, "alpha"), "alpha");
    p.beta = integer(field(j, "beta"), "beta");
    const json& om = field(j, "Omega");
    if (!om.is_array() || om.size() != 2) throw Error(ErrorCode::ParseError, "Omega must be 2x2");
    for (int r = 0; r < 2; ++r) {
        const auto row = vec(om[r], 2, "Omega row");
        p.omega(r, 0) = row[0];
        p.omega(r, 1) = row[1];
    }
    const auto u0 = vec(field(j, "u0"), 2, "u0");
    const auto C = vec(field(j, "C"), 2, "C");
    const auto an = vec(field(j, "anchor"), 2, "anchor");
    p.u0 = Vec2(u0[0], u0[1]);
    p.C = Vec2(C[0], C[1]);
    p.anchor = cplx(an[0], an[1]);
    p.residual = j.contains("residual") ? num(j.at("residual"), "residual") : 0.0;
    return p;
}

MapParams read_params(const std::string& path) { return parse_params(slurp(path)); }

std::string params_json(const MapParams& p) {
    json j;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["Omega"] = {{p.omega(0, 0), p.omega(0, 1)}, {p.omega(1, 0), p.omega(1, 1)}};
    j["u0"] = {p.u0[0], p.u0[1]};
    j["C"] = {p.C[0], p.C[1]};
    j["anchor"] = {p.anchor.real(), p.anchor.imag()};
    j["residual"] = p.residual;
    return j.dump(2) + "\n";
}

cplx parse_complex(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty complex number");
    const char last = s.back();
    if (last != 'i' && last != 'j') return {to_double(s), 0.0};
    s.pop_back();
    // split at the last sign that is not an exponent sign
    std::size_t cut = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            cut = k;
            break;
        }
    }
    const std::string re = cut == std::string::npos ? "" : s.substr(0, cut);
    std::string im = cut == std::string::npos ? s : s.substr(cut);
    if (im.empty() || im == "+") im = "1";
    else if (im == "-") im = "-1";
    return {re.empty() ? 0.0 : to_double(re), to_double(im)};
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_complex(cplx z) {
    const double im = z.imag();
    return format_double(z.real()) + (std::signbit(im) ? "-" : "+") + format_double(std::fabs(im)) + "i";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::ParseError, "write failed for " + path);
}

std::string grid_csv(const std::vector<GridPoint>& rows) {
    std::string s = "w_re,w_im,x_re,x_im\n";
    for (const GridPoint& r : rows) {
        s += format_double(r.w.real()) + "," + format_double(r.w.imag()) + "," +
             format_double(r.x.real()) + "," + format_double(r.x.imag()) + "\n";
    }
    return s;
}

namespace {

struct Frame {
    double x0, y1, scale, ox, oy;
    double px(cplx z) const { return ox + (z.real() - x0) * scale; }
    double py(cplx z) const { return oy + (y1 - z.imag()) * scale; }
    std::string pt(cplx z) const {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f,%.3f", px(z), py(z));
        return buf;
    }
};

Frame frame_for(const SvgPanel& p, double ox, double oy, double size) {
    double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
    auto eat = [&](cplx z) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
        lo_x = std::min(lo_x, z.real());
        hi_x = std::max(hi_x, z.real());
        lo_y = std::min(lo_y, z.imag());
        hi_y = std::max(hi_y, z.imag());
    };
    for (cplx z : p.outline) eat(z);
    for (const auto& c : p.curves)
        for (cplx z : c) eat(z);
    if (!(lo_x < hi_x)) lo_x -= 1, hi_x += 1;
    if (!(lo_y < hi_y)) lo_y -= 1, hi_y += 1;
    const double span = std::max(hi_x - lo_x, hi_y - lo_y);
    return {lo_x, hi_y, size / span, ox, oy};
}

void polyline(std::ostringstream& os, const Frame& f, const std::vector<cplx>& pts, bool closed,
              const char* style) {
    std::string d;
    bool pen = false;
    for (cplx z : pts) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            pen = false;
            continue;
        }
        d += (pen ? " L" : " M") + f.pt(z);
        pen = true;
    }
    if (d.empty()) return;
    if (closed) d += " Z";
    os << "<path d=\"" << d.substr(1) << "\" " << style << "/>\n";
}

void panel(std::ostringstream& os, const SvgPanel& p, double ox) {
    constexpr double kSize = 420, kMargin = 30;
    const Frame f = frame_for(p, ox + kMargin, kMargin, kSize);
    for (const auto& [a, b] : p.axes) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"#999\" stroke-width=\"1\"/>\n",
                      f.px(a), f.py(a), f.px(b), f.py(b));
        os << buf;
    }
    for (const auto& c : p.curves) polyline(os, f, c, false, "fill=\"none\" stroke=\"#3366aa\" stroke-width=\"0.6\"");
    polyline(os, f, p.outline, true, "fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\"");
}

}  // namespace

std::string grid_svg(const SvgPanel& left, const SvgPanel& right) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"480\" viewBox=\"0 0 960 480\">\n";
    os << "<!-- " << left.title << " | " << right.title << " -->\n";
    panel(os, left, 0);
    panel(os, right, 480);
    os << "</svg>\n";
    return os.str();
}

}  // namespace hepta::io

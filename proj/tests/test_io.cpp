#include <doctest.h>

#include <cmath>

#include "heptamap/error.hpp"
#include "heptamap/io.hpp"

using namespace hepta;

TEST_SUITE("io") {

TEST_CASE("complex literals") {
    CHECK(io::parse_complex("1.5+0.5i") == cplx(1.5, 0.5));
    CHECK(io::parse_complex(" 1.5 - 0.5 i ") == cplx(1.5, -0.5));
    CHECK(io::parse_complex("-2") == cplx(-2.0, 0.0));
    CHECK(io::parse_complex("3i") == cplx(0.0, 3.0));
    CHECK(io::parse_complex("-i") == cplx(0.0, -1.0));
    CHECK(io::parse_complex("1e-3+2.5e+2i") == cplx(1e-3, 250.0));
    CHECK(io::parse_complex("-1E2-1E-2j") == cplx(-100.0, -0.01));
    for (const char* bad : {"", "1.5+", "abc", "1+2k", "1..2"}) CHECK_THROWS_AS(io::parse_complex(bad), Error);
}

TEST_CASE("complex formatting round trips bit for bit") {
    for (cplx z : {cplx(0.1, -0.2), cplx(1e-300, 7.0), cplx(-3.141592653589793, 2.718281828459045)}) {
        const cplx back = io::parse_complex(io::format_complex(z));
        CHECK(back.real() == z.real());
        CHECK(back.imag() == z.imag());
    }
}

TEST_CASE("heptagon JSON") {
    const Heptagon h = io::parse_heptagon(R"({"alpha": 5, "beta": 6, "H": [5, 2, 1, 1, -0.8584073464102069]})");
    CHECK(h.alpha == 5);
    CHECK(h.H[4] == -0.8584073464102069);
    const Heptagon back = io::parse_heptagon(io::heptagon_json(h));
    CHECK(back.H == h.H);
    CHECK_THROWS_AS(io::parse_heptagon(R"({"alpha": 5, "beta": 6, "H": [1, 2]})"), Error);
    CHECK_THROWS_AS(io::parse_heptagon(R"({"alpha": 5.5, "beta": 6, "H": [1, 2, 3, 4, 5]})"), Error);
    CHECK_THROWS_AS(io::parse_heptagon(R"({"beta": 6, "H": [1, 2, 3, 4, 5]})"), Error);
    CHECK_THROWS_AS(io::parse_heptagon("{"), Error);
    CHECK_THROWS_AS(io::read_heptagon("/nonexistent/heptagon.json"), Error);
}

TEST_CASE("params JSON round trips exactly") {
    MapParams p;
    p.omega << 2.1350271120756514, 1.7985379213058212, 1.7985379213058212, 2.128749758040286;
    p.u0 = Vec2(0.09757932107060367, 0.09707158206270089);
    p.C = Vec2(4.000000000000691, -2.0000000000006937);
    p.residual = 3.5e-13;
    const std::string s = io::params_json(p);
    const MapParams q = io::parse_params(s);
    CHECK(q.omega == p.omega);
    CHECK(q.u0 == p.u0);
    CHECK(q.C == p.C);
    CHECK(q.anchor == p.anchor);
    CHECK(io::params_json(q) == s);
    try {
        io::parse_params("[1, 2]");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
    }
}

TEST_CASE("grid CSV and SVG") {
    const std::string csv = io::grid_csv({{cplx(0.1, 0.2), cplx(1.0, 0.5)}});
    CHECK(csv.rfind("w_re,w_im,x_re,x_im\n", 0) == 0);
    CHECK(csv.find("0.10000000000000001,0.20000000000000001,1,0.5\n") != std::string::npos);
    io::SvgPanel a, b;
    a.outline = {cplx(0, 0), cplx(1, 0), cplx(1, 1)};
    a.curves = {{cplx(0.2, 0.2), cplx(NAN, NAN), cplx(0.5, 0.5), cplx(0.6, 0.6)}};
    b.axes = {{cplx(-1, 0), cplx(1, 0)}};
    b.curves = {{cplx(0, 1), cplx(0.5, 2)}};
    const std::string svg = io::grid_svg(a, b);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<line") != std::string::npos);
    CHECK(svg.find("<path") != std::string::npos);
    for (const char* tag : {"<circle", "<rect", "<polyline", "<text"}) CHECK(svg.find(tag) == std::string::npos);
    // a NaN breaks the pen into two sub-paths
    CHECK(svg.find(" M") != std::string::npos);
}

}

// heptamap: validate heptagons, solve map parameters, map points and grids, run the self-test.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "heptamap/error.hpp"
#include "heptamap/heptagon.hpp"
#include "heptamap/io.hpp"
#include "heptamap/mapper.hpp"
#include "heptamap/oracle.hpp"
#include "heptamap/selftest.hpp"

namespace {

using namespace hepta;

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kIo = 2;

struct Common {
    double tol = 1e-9;
    bool oracle = false;
    int seed_table = 24;
    unsigned threads = 0;
};

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") std::cout << text;
    else io::write_text(out, text);
}

MapOptions map_options(const Common& c) {
    MapOptions o;
    o.tol = c.tol;
    o.seeds = c.seed_table;
    return o;
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(requested ? requested : hw, jobs)));
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < worker_count(threads, n); ++t)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next++) < n;) f(k);
        });
    for (auto& t : pool) t.join();
}

int cmd_validate(const std::string& file, const Common& c) {
    const Heptagon h = io::read_heptagon(file);
    const auto v = validate(h, std::min(c.tol, 1e-12));
    for (const Violation& x : v) std::cout << "violated " << x.rule << "  value " << x.detail << "\n";
    if (v.empty()) std::cout << "valid (" << h.alpha << "," << h.beta << ")\n";
    return v.empty() ? kOk : kDomain;
}

int cmd_solve(const std::string& file, const std::string& out, const Common& c) {
    const Heptagon h = io::read_heptagon(file);
    SolveOptions so;
    so.tol = c.tol;
    SolveReport rep;
    const MapParams p = solve_parameters(h, so, &rep);
    std::cerr << "solved: residual " << p.residual << ", " << rep.continuation_steps << " continuation steps, "
              << rep.newton_iterations << " Newton iterations\n";
    if (c.oracle) {
        const auto q = oracle::sides_by_quadrature(oracle::curve_from_params(p), p.alpha, p.beta, 1e-12);
        double worst = 0;
        for (int s = 0; s < 5; ++s) worst = std::max(worst, std::fabs(q[s] - h.H[s]));
        std::cerr << "oracle: side lengths by quadrature differ by " << worst << "\n";
        if (!(worst <= 1e-8)) throw Error(ErrorCode::NoConvergence, "oracle disagrees with the solved parameters");
    }
    emit(out, io::params_json(p));
    return kOk;
}

int cmd_map(const std::string& file, const std::string& point, const std::string& direction, const Common& c) {
    const MapParams p = io::read_params(file);
    const cplx in = io::parse_complex(point);
    const ConformalMap cm(p, map_options(c));
    const bool forward = direction == "forward";
    const cplx out = forward ? cm.to_halfplane(in) : cm.to_heptagon(in);
    std::cout << io::format_complex(out) << "\n";
    if (c.oracle) {
        const cplx w = forward ? in : out;
        const cplx x = forward ? out : in;
        const cplx z = cm.x_to_z(x, Norm{});
        const cplx q = oracle::cs_by_quadrature(oracle::curve_from_params(p), p.alpha, p.beta, z, 1e-12);
        std::cerr << "oracle: quadrature CS value differs by " << std::abs(q - w) << "\n";
        if (!(std::abs(q - w) <= 1e-8)) throw Error(ErrorCode::NoConvergence, "oracle disagrees with the map");
    }
    return kOk;
}

struct Box {
    double x0, x1, y0, y1;
};

Box grid_box(const VertexSet& v) {
    Box b{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (cplx w : v.w) {
        b.x0 = std::min(b.x0, w.real());
        b.x1 = std::max(b.x1, w.real());
        b.y0 = std::min(b.y0, w.imag());
        b.y1 = std::max(b.y1, w.imag());
    }
    b.x1 += kPi;  // a channel stretch one width deep
    return b;
}

int cmd_grid(const std::string& file, int nx, int ny, const std::string& out, const std::string& svg,
             const Common& c) {
    if (nx < 2 || ny < 2) throw Error(ErrorCode::ParseError, "grid dimensions must be at least 2");
    const MapParams p = io::read_params(file);
    const ConformalMap cm(p, map_options(c));
    const VertexSet& v = cm.vertex_set();
    const Box b = grid_box(v);
    const double size = std::max(b.x1 - b.x0, b.y1 - b.y0);
    auto node = [&](int i, int j) {
        return cplx(b.x0 + (i + 0.5) / nx * (b.x1 - b.x0), b.y0 + (j + 0.5) / ny * (b.y1 - b.y0));
    };
    std::vector<cplx> img(static_cast<std::size_t>(nx) * ny, cplx(NAN, NAN));
    std::vector<char> inside(img.size(), 0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const cplx w = node(i, j);
            inside[i * ny + j] = contains(v, w) && boundary_distance(v, w) > 1e-9 * size;
        }
    std::vector<std::string> errors(img.size());
    parallel_for(img.size(), c.threads, [&](std::size_t k) {
        if (!inside[k]) return;
        try {
            img[k] = cm.to_halfplane(node(static_cast<int>(k / ny), static_cast<int>(k % ny)));
        } catch (const Error& e) {
            errors[k] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw Error(ErrorCode::NoConvergence, "grid point failed: " + e);
    std::vector<io::GridPoint> rows;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (inside[i * ny + j]) rows.push_back({node(i, j), img[i * ny + j]});
    emit(out, io::grid_csv(rows));
    if (!svg.empty()) {
        io::SvgPanel left, right;
        left.title = "heptagon mesh";
        right.title = "image in the upper half plane";
        left.outline = outline(v, b.x1 + 0.5);
        double xmin = INFINITY, xmax = -INFINITY;
        for (int i = 0; i < nx; ++i) {
            std::vector<cplx> lw, lx;
            for (int j = 0; j < ny; ++j) {
                const bool in = inside[i * ny + j];
                lw.push_back(in ? node(i, j) : cplx(NAN, NAN));
                lx.push_back(img[i * ny + j]);
            }
            left.curves.push_back(lw);
            right.curves.push_back(lx);
        }
        for (int j = 0; j < ny; ++j) {
            std::vector<cplx> lw, lx;
            for (int i = 0; i < nx; ++i) {
                const bool in = inside[i * ny + j];
                lw.push_back(in ? node(i, j) : cplx(NAN, NAN));
                lx.push_back(img[i * ny + j]);
                if (in) {
                    xmin = std::min(xmin, img[i * ny + j].real());
                    xmax = std::max(xmax, img[i * ny + j].real());
                }
            }
            left.curves.push_back(lw);
            right.curves.push_back(lx);
        }
        if (xmin <= xmax) right.axes.push_back({cplx(xmin, 0), cplx(xmax, 0)});
        io::write_text(svg, io::grid_svg(left, right));
    }
    std::cerr << rows.size() << " interior points\n";
    return kOk;
}

int cmd_selftest(const Common& c, std::uint64_t seed, bool verbose, const std::vector<int>& only) {
    selftest::Options o;
    o.tol = c.tol;
    o.seed = seed;
    o.threads = c.threads;
    if (verbose) o.log = &std::cerr;
    bool all = true;
    for (int id = 1; id <= 8; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        static constexpr selftest::Check (*fns[])(const selftest::Options&) = {
            selftest::theta_correctness, selftest::periods_and_aj,   selftest::rosenhain_round_trip,
            selftest::divisor_and_projection, selftest::third_kind, selftest::end_to_end,
            selftest::humbert_edge,        selftest::conformality};
        const selftest::Check ch = fns[id - 1](o);
        std::cout << selftest::format(ch) << std::flush;
        all = all && ch.pass;
    }
    std::cout << (all ? "selftest PASS\n" : "selftest FAIL\n");
    return all ? kOk : kDomain;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal maps between rectangular heptagons and the upper half plane"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--tol", c.tol, "accuracy target")->check(CLI::PositiveNumber);
    app.add_flag("--oracle", c.oracle, "cross-check against quadrature");
    app.add_option("--seed-table", c.seed_table, "number of walk seeds")->check(CLI::Range(1, 200));
    app.add_option("--threads", c.threads, "worker threads, 0 for all cores");

    std::string file, out, point, direction = "forward", svg;
    int nx = 20, ny = 20;
    std::uint64_t seed = selftest::Options{}.seed;
    bool verbose = false;
    std::vector<int> only;

    auto* val = app.add_subcommand("validate", "check the side-length constraints of a heptagon file");
    val->add_option("file", file, "heptagon JSON")->required();
    auto* sol = app.add_subcommand("solve", "solve the parameter problem for a heptagon file");
    sol->add_option("file", file, "heptagon JSON")->required();
    sol->add_option("-o,--out", out, "params JSON output, stdout if omitted");
    auto* map = app.add_subcommand("map", "map one point");
    map->add_option("params", file, "params JSON")->required();
    map->add_option("point", point, "complex number a+bi")->required();
    map->add_option("-d,--direction", direction, "forward: heptagon to half plane, inverse: back")
        ->check(CLI::IsMember({"forward", "inverse"}));
    auto* grid = app.add_subcommand("grid", "map an interior mesh of the heptagon");
    grid->add_option("params", file, "params JSON")->required();
    grid->add_option("--nx", nx, "mesh columns");
    grid->add_option("--ny", ny, "mesh rows");
    grid->add_option("-o,--out", out, "CSV output, stdout if omitted");
    grid->add_option("--svg", svg, "SVG drawing of the mesh and its image");
    auto* st = app.add_subcommand("selftest", "run the acceptance battery");
    st->add_option("--seed", seed, "random seed");
    st->add_flag("-v,--verbose", verbose, "per-heptagon progress on stderr");
    st->add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, 8));
    for (CLI::App* sub : {val, sol, map, grid, st}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kIo;
    }

    try {
        if (*val) return cmd_validate(file, c);
        if (*sol) return cmd_solve(file, out, c);
        if (*map) return cmd_map(file, point, direction, c);
        if (*grid) return cmd_grid(file, nx, ny, out, svg, c);
        if (*st) return cmd_selftest(c, seed, verbose, only);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::ParseError ? kIo : kDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    }
    return kDomain;
}

#pragma once

// Auxiliary parameters (Omega, u0, C) of a heptagon and the conformal map
//
//   w(u) = anchor + log(-theta[c](u + u0) / theta[c](u - u0)) + C.u,  theta[35](u) = 0
//
// between the H+ sheet of the curve and the heptagon. c is any odd characteristic
// [s35] with s in 2..6 (all give the same function on the curve); it is picked per
// point for conditioning.

#include <array>
#include <string>
#include <vector>

#include "heptamap/curve.hpp"
#include "heptamap/heptagon.hpp"
#include "heptamap/theta.hpp"

namespace hepta {

struct MapParams {
    int alpha = 5;
    int beta = 6;
    Mat2 omega = Mat2::Identity();
    Vec2 u0 = Vec2::Zero();
    Vec2 C = Vec2::Zero();
    cplx anchor{0.0, kPi};  // w(u(p1))
    double residual = 0.0;  // max side-length residual at the solution
};

// the unique u2 in (0, 1/2) with theta[35]((u1, u2), i Omega) = 0
double solve_u0_second(const Mat2& omega, double u1, double tol = 1e-15);

// (C1, C2) from the wedge condition at u(p_alpha), u(p_beta)
Vec2 solve_C(const Mat2& omega, const Vec2& u0, int alpha, int beta, double tol = 1e-14);

struct ForwardResult {
    Heptagon h;
    Vec2 u0;
    Vec2 C;
    std::vector<Violation> violations;
};

ForwardResult forward_sides(const Mat2& omega, double u1, int alpha, int beta,
                            double tol = 1e-14);

struct SolveOptions {
    double tol = 1e-9;  // required side-length residual
    Mat2 omega0 = (Mat2() << 2.0, 0.5, 0.5, 1.5).finished();
    double u1_0 = 0.2;
    int max_newton = 30;
};

struct SolveReport {
    int continuation_steps = 0;
    int newton_iterations = 0;
    int forward_evaluations = 0;
    Mat2 start_omega;
    double start_u1 = 0;
};

MapParams solve_parameters(const Heptagon& h, const SolveOptions& opt = {},
                           SolveReport* report = nullptr);

// the heptagon produced by the side formulas at given parameters
Heptagon heptagon_of(const MapParams& p);

struct EquationResiduals {
    std::array<double, 4> sides{};  // H1, H2, H4, H5
    double divisor = 0;             // |theta[35](u0)| / series scale
    std::array<double, 2> wedge{};  // at alpha, beta, relative
    double max() const;
};

EquationResiduals equation_residuals(const MapParams& p, const Heptagon& h);

struct MapOptions {
    int seeds = 24;
    double tol = 1e-9;
};

class ConformalMap {
public:
    struct State {
        CVec2 u;
        cplx z;
        cplx w;
        cplx R;      // theta[c](u + u0) / theta[c](u - u0)
        int ch = 0;  // label s of the characteristic [s35] last used
    };

    explicit ConformalMap(const MapParams& p, MapOptions opt = {});

    const MapParams& params() const { return p_; }
    const Heptagon& heptagon() const { return h_; }
    const VertexSet& vertex_set() const { return verts_; }
    const std::vector<State>& seeds() const { return seeds_; }

    // marked chart z = 1/(x0 - x) built on the Rosenhain chart
    const std::array<double, 6>& marked_points() const { return zs_; }
    double x0_rosenhain() const { return x0_; }
    const std::array<double, 3>& rosenhain_points() const { return ros_; }
    cplx z_of_u(const CVec2& u, CVec2* grad = nullptr) const;
    cplx x_to_z(cplx x, const Norm& norm) const;
    cplx z_to_x(cplx z, const Norm& norm) const;
    double branch_image(int s, const Norm& norm) const;

    // CS integral at a point of the divisor in the closed H+ tile
    cplx cs_value(const CVec2& u) const;
    std::array<cplx, 6> vertex_images() const;

    State solve_w(cplx w) const;
    State solve_z(cplx z) const;
    cplx to_halfplane(cplx w, const Norm& norm = {}) const;
    cplx to_heptagon(cplx x, const Norm& norm = {}) const;

private:
    struct LogRatio {
        cplx R;
        CVec2 dlog;
        int ch;
    };

    LogRatio log_ratio(const CVec2& u, bool grad, int hint) const;
    ThetaEval theta35(const CVec2& u) const;
    cplx w_principal(const CVec2& u, const LogRatio& lr) const;
    bool in_hplus_closure(const CVec2& u, double tol) const;
    State start_state() const;
    bool newton(State& s, const State& from, cplx target, bool in_w) const;
    State walk(const State& from, cplx target, bool in_w) const;
    State walk_polyline(const State& from, const std::vector<cplx>& path) const;
    const State& nearest_seed_z(cplx z) const;
    Mobius norm_map(const Norm& norm) const;
    void build_seeds();

    MapParams p_;
    MapOptions opt_;
    Heptagon h_;
    VertexSet verts_;
    RiemannMatrix rm_;
    // z(u) = B^2 / (x0 B^2 - kappa A^2), A = theta[zn_], B = theta[zd_], for k = 3 and k = 4
    std::array<IntChar, 2> zn_, zd_;
    std::array<double, 2> kappa_{1, 1};
    double zgap_ = 1;  // smallest gap between marked branch points
    std::array<double, 3> ros_{};
    double x0_ = 0;
    std::array<double, 6> zs_{};
    double zscale_ = 1;
    std::vector<State> seeds_;
};

}  // namespace hepta

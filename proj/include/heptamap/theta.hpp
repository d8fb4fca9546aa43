#pragma once

// Genus-2 Riemann theta function with characteristics.
//
//   theta[e,e'](u, Pi) = sum_m exp(2 pi i n.(u + e'/2) + pi i n.Pi.n),  n = m + e/2
//
// Characteristics use the half-period scaling u = (Pi e + e')/2, so integer
// characteristics have entries 0/1 and RealChar carries the same numbers.

#include <array>
#include <initializer_list>
#include <span>
#include <string>

#include "heptamap/simd.hpp"
#include "heptamap/types.hpp"

namespace hepta {

struct IntChar {
    std::array<int, 2> eps{0, 0};
    std::array<int, 2> epsp{0, 0};

    friend bool operator==(const IntChar&, const IntChar&) = default;
};

struct RealChar {
    Vec2 eps = Vec2::Zero();
    Vec2 epsp = Vec2::Zero();

    RealChar() = default;
    RealChar(const Vec2& e, const Vec2& ep) : eps(e), epsp(ep) {}
    RealChar(const IntChar& c)  // NOLINT: integer characteristics embed implicitly
        : eps(c.eps[0], c.eps[1]), epsp(c.epsp[0], c.epsp[1]) {}
};

enum class Parity { Even, Odd };

Parity char_parity(const IntChar& c);
IntChar char_add(const IntChar& a, const IntChar& b);
// mod-2 sum of the branch-point half-period characteristics; label 1 is the zero char
IntChar char_from_indices(std::span<const int> labels);
IntChar char_from_indices(std::initializer_list<int> labels);
// two-row notation "ab","cd" meaning eps = (a,c), epsp = (b,d)
IntChar char_from_rows(const char* row1, const char* row2);
std::string to_string(const IntChar& c);
// all 16 characteristics in a fixed order
std::array<IntChar, 16> all_chars();

class RiemannMatrix {
public:
    explicit RiemannMatrix(const CMat2& pi);
    static RiemannMatrix from_omega(const Mat2& omega);

    const CMat2& pi() const { return pi_; }
    const Mat2& y() const { return y_; }
    const Mat2& y_inv() const { return y_inv_; }

private:
    CMat2 pi_;
    Mat2 y_;
    Mat2 y_inv_;
};

struct ThetaOptions {
    double tol = 1e-13;
    double max_radius = 60.0;  // cap on the index-space half-width of the summed ellipse
    bool verify = true;        // double the radius once and check the shell contribution
    simd::Backend backend = simd::active_backend();
};

struct ThetaEval {
    cplx value;
    CVec2 grad;
    double max_term = 0.0;  // largest |term| summed ("series scale")
    int terms = 0;
};

ThetaEval theta_eval(const RealChar& c, const CVec2& u, const RiemannMatrix& pi,
                     const ThetaOptions& opt = {}, bool want_grad = true);

cplx theta(const CVec2& u, const RiemannMatrix& pi, double tol = 1e-13);
cplx theta_char(const RealChar& c, const CVec2& u, const RiemannMatrix& pi, double tol = 1e-13);
CVec2 theta_grad(const RealChar& c, const CVec2& u, const RiemannMatrix& pi,
                 double tol = 1e-13);
cplx theta_const(const IntChar& c, const RiemannMatrix& pi, double tol = 1e-13);

// u = (Pi e + e')/2 and back (Pi = i Omega)
CVec2 point_of(const RealChar& c, const Mat2& omega);
RealChar char_of(const CVec2& u, const Mat2& omega);

struct TileLabel {
    std::array<int, 2> sigma_eps{1, 1};   // +1 / -1
    std::array<int, 2> sigma_epsp{1, 1};
    bool boundary = false;

    bool is_hplus() const {
        return sigma_eps[0] < 0 && sigma_eps[1] < 0 && sigma_epsp[0] > 0 && sigma_epsp[1] > 0;
    }
};

TileLabel tile_of(const CVec2& u, const Mat2& omega, double tol = 1e-9);

}  // namespace hepta

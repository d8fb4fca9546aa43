#pragma once

// Rectangular heptagons: six right angles and a width-pi channel to the east.
// Side lengths are signed, i^s H_s = w_s - w_{s+1}, w1 = i pi.

#include <array>
#include <string>
#include <vector>

#include "heptamap/types.hpp"

namespace hepta {

struct Heptagon {
    int alpha = 5;
    int beta = 6;
    std::array<double, 5> H{};
};

struct Violation {
    std::string rule;    // stable identifier, e.g. "(5,6): -H2+H4<0"
    std::string detail;  // the offending value
};

std::vector<Violation> validate(const Heptagon& h, double tol = 1e-12);

struct VertexSet {
    std::array<cplx, 6> w;  // channel rays start at w6 and w1 and run to +inf
};

VertexSet vertices(const Heptagon& h);
Heptagon reflect(const Heptagon& h);

// closed polygon with the channel cut at Re w = far
std::vector<cplx> outline(const VertexSet& v, double far);
double channel_cut(const VertexSet& v, double extra_re);
double boundary_distance(const VertexSet& v, cplx w);
bool contains(const VertexSet& v, cplx w, double tol = 1e-12);
bool segment_inside(const VertexSet& v, cplx a, cplx b, double tol = 1e-12);

}  // namespace hepta

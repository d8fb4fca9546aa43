#pragma once

// File formats: heptagon and params JSON, complex literals, grid CSV and SVG.

#include <iosfwd>
#include <string>
#include <vector>

#include "heptamap/heptagon.hpp"
#include "heptamap/mapper.hpp"

namespace hepta::io {

// all parse and read failures throw Error(ParseError)
Heptagon parse_heptagon(const std::string& text);
Heptagon read_heptagon(const std::string& path);
std::string heptagon_json(const Heptagon& h);

MapParams parse_params(const std::string& text);
MapParams read_params(const std::string& path);
std::string params_json(const MapParams& p);

// "a+bi", "a-bi", "a", "bi", "-i", spaces allowed
cplx parse_complex(const std::string& s);
std::string format_double(double v);  // 17 significant digits
std::string format_complex(cplx z);

void write_text(const std::string& path, const std::string& text);

struct GridPoint {
    cplx w;
    cplx x;
};

std::string grid_csv(const std::vector<GridPoint>& rows);

// two panels side by side, polylines only
struct SvgPanel {
    std::string title;
    std::vector<cplx> outline;               // closed
    std::vector<std::vector<cplx>> curves;   // mesh lines
    std::vector<std::pair<cplx, cplx>> axes; // straight reference lines
};

std::string grid_svg(const SvgPanel& left, const SvgPanel& right);

}  // namespace hepta::io

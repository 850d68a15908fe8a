#pragma once

#include <string>
#include <vector>

#include "lanebev/grid.hpp"

namespace lanebev {

/// Static top-down SVG of the BEV extent: forward x points up the page,
/// lateral y (left positive) points left. One <polyline> per lane.
std::string render_bev_svg(const std::vector<Lane3D>& lanes, const GridSpec& extent, double pixels_per_meter = 8.0);

}  // namespace lanebev

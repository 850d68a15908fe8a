#include "lanebev/plot.hpp"

#include <array>
#include <cstdio>
#include <sstream>

namespace lanebev {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_bev_svg(const std::vector<Lane3D>& lanes, const GridSpec& extent, double pixels_per_meter) {
  const double width = (extent.y_max - extent.y_min) * pixels_per_meter;
  const double height = (extent.x_max - extent.x_min) * pixels_per_meter;
  auto sx = [&](double y) { return (extent.y_max - y) * pixels_per_meter; };
  auto sy = [&](double x) { return (extent.x_max - x) * pixels_per_meter; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\"" << fixed(height)
      << "\" viewBox=\"0 0 " << fixed(width) << ' ' << fixed(height) << "\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << fixed(width) << "\" height=\"" << fixed(height)
      << "\" fill=\"#202020\"/>\n";
  // 10 m forward ticks.
  for (double x = extent.x_min; x <= extent.x_max + 1e-9; x += 10.0) {
    svg << "  <line x1=\"0\" y1=\"" << fixed(sy(x)) << "\" x2=\"" << fixed(width) << "\" y2=\"" << fixed(sy(x))
        << "\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
  }
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    svg << "  <polyline data-lane-id=\"" << lanes[i].id << "\" fill=\"none\" stroke=\""
        << kPalette[i % kPalette.size()] << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < lanes[i].points.size(); ++k) {
      const auto& p = lanes[i].points[k];
      svg << (k ? " " : "") << fixed(sx(p.y())) << ',' << fixed(sy(p.x()));
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace lanebev

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tradenet/date.hpp"

namespace tradenet {

struct ChartSeries {
  std::string label;
  std::vector<double> values;  // one per x position
  std::string color = "#1f77b4";
};

struct ChartMarker {
  std::size_t index = 0;  // x position
  double value = 0.0;
  bool entry = true;      // entry markers are green triangles up, exits red down
};

struct ChartSpec {
  std::string title;
  std::vector<Date> dates;  // optional x labels; first and last are printed
  std::vector<ChartSeries> series;
  std::vector<ChartMarker> markers;
  int width = 900;
  int height = 420;
};

// Line chart with one polyline per series and one <path> per marker.
// Coordinates are printed with two decimals so the output is deterministic.
// Throws EmptyInput when there is no series or a series is empty.
std::string emit_svg_chart(const ChartSpec& spec);

}  // namespace tradenet

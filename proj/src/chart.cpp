#include "tradenet/chart.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "tradenet/error.hpp"

namespace tradenet {

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string emit_svg_chart(const ChartSpec& spec) {
  if (spec.series.empty()) throw Error(Errc::EmptyInput, "chart has no series");
  std::size_t n = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : spec.series) {
    if (s.values.empty()) throw Error(Errc::EmptyInput, "series '" + s.label + "' is empty");
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  for (const auto& m : spec.markers) {
    lo = std::min(lo, m.value);
    hi = std::max(hi, m.value);
  }
  if (hi == lo) {
    lo -= 1.0;
    hi += 1.0;
  }

  const double left = 60.0, right = 20.0, top = 40.0, bottom = 40.0;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto x_of = [&](std::size_t i) { return left + (n > 1 ? pw * static_cast<double>(i) / static_cast<double>(n - 1) : pw / 2.0); };
  auto y_of = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed2(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" +
         escape_xml(spec.title) + "</text>\n";
  out += "<g class=\"axes\" stroke=\"#444\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top) + "\" x2=\"" + fixed2(left) + "\" y2=\"" +
         fixed2(top + ph) + "\"/>\n";
  out += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top + ph) + "\" x2=\"" + fixed2(left + pw) +
         "\" y2=\"" + fixed2(top + ph) + "\"/>\n";
  out += "</g>\n";
  out += "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
  out += "<text x=\"4\" y=\"" + fixed2(top + 4) + "\">" + fixed2(hi) + "</text>\n";
  out += "<text x=\"4\" y=\"" + fixed2(top + ph) + "\">" + fixed2(lo) + "</text>\n";
  if (!spec.dates.empty()) {
    out += "<text x=\"" + fixed2(left) + "\" y=\"" + fixed2(top + ph + 16) + "\">" + to_iso(spec.dates.front()) +
           "</text>\n";
    out += "<text x=\"" + fixed2(left + pw) + "\" y=\"" + fixed2(top + ph + 16) + "\" text-anchor=\"end\">" +
           to_iso(spec.dates.back()) + "</text>\n";
  }
  out += "</g>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    out += "<polyline class=\"series\" fill=\"none\" stroke=\"" + escape_xml(s.color) +
           "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (i) out += ' ';
      out += fixed2(x_of(i)) + "," + fixed2(y_of(s.values[i]));
    }
    out += "\"><title>" + escape_xml(s.label) + "</title></polyline>\n";
    out += "<text x=\"" + fixed2(left + pw - 120) + "\" y=\"" + fixed2(top + 14.0 * static_cast<double>(k + 1)) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + escape_xml(s.color) + "\">" +
           escape_xml(s.label) + "</text>\n";
  }

  for (const auto& m : spec.markers) {
    const double x = x_of(m.index), y = y_of(m.value);
    const double d = m.entry ? 7.0 : -7.0;  // apex below the point for entries
    out += std::string("<path class=\"") + (m.entry ? "entry" : "exit") + "\" fill=\"" +
           (m.entry ? "#2ca02c" : "#d62728") + "\" d=\"M " + fixed2(x) + " " + fixed2(y) + " L " + fixed2(x - 5) +
           " " + fixed2(y + d) + " L " + fixed2(x + 5) + " " + fixed2(y + d) + " Z\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace tradenet

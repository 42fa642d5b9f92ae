#include "pla/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "pla/error.hpp"

namespace pla {

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_curve_svg(const std::filesystem::path& path, const std::string& title,
                     std::span<const std::pair<double, double>> points,
                     const std::string& config_hash) {
  if (points.empty()) raise("InvalidConfig", "curve needs at least one point");

  constexpr double kWidth = 640, kHeight = 360, kMargin = 56;
  double xmin = points[0].first, xmax = points[0].first;
  double ymin = points[0].second, ymax = points[0].second;
  for (const auto& [x, y] : points) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (xmax - xmin <= 0.0) xmax = xmin + 1.0;
  if (ymax - ymin <= 0.0) ymax = ymin + 1.0;

  auto sx = [&](double x) {
    return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin);
  };
  auto sy = [&](double y) {
    return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) raise("IoError", "cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<!-- config_hash=" << config_hash << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";

  // axes
  out << "<line x1=\"" << px(kMargin) << "\" y1=\"" << px(kHeight - kMargin)
      << "\" x2=\"" << px(kWidth - kMargin) << "\" y2=\"" << px(kHeight - kMargin)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << px(kMargin) << "\" y1=\"" << px(kMargin) << "\" x2=\""
      << px(kMargin) << "\" y2=\"" << px(kHeight - kMargin)
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << px(kMargin) << "\" y=\"" << px(kHeight - kMargin + 18)
      << "\" font-family=\"sans-serif\" font-size=\"11\">t=" << px(xmin)
      << "h</text>\n";
  out << "<text x=\"" << px(kWidth - kMargin) << "\" y=\""
      << px(kHeight - kMargin + 18)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">t="
      << px(xmax) << "h</text>\n";
  out << "<text x=\"" << px(kMargin - 6) << "\" y=\"" << px(kHeight - kMargin)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << px(ymin) << "</text>\n";
  out << "<text x=\"" << px(kMargin - 6) << "\" y=\"" << px(kMargin + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << px(ymax) << "</text>\n";

  out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out << " ";
    out << px(sx(points[i].first)) << "," << px(sy(points[i].second));
  }
  out << "\"/>\n";
  out << "</svg>\n";
  if (!out) raise("IoError", "short write to " + path.string());
}

}  // namespace pla

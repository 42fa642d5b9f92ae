#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>

namespace pla {

// Minimal cumulative-curve plot: one polyline over (time, score) points with
// axes and min/max labels. No plotting dependency; output is deterministic
// and diff-able.
void write_curve_svg(const std::filesystem::path& path, const std::string& title,
                     std::span<const std::pair<double, double>> points,
                     const std::string& config_hash);

}  // namespace pla

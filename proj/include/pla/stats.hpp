#pragma once

#include <optional>
#include <span>
#include <vector>

namespace pla {

// Pearson correlation; nullopt when either side has (numerically) zero
// variance, so degenerate data never turns into NaN downstream.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

// average ranks, ties shared (1-based)
std::vector<double> average_ranks(std::span<const double> v);

// Spearman rank correlation with average-rank tie handling.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

}  // namespace pla

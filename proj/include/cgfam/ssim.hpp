#pragma once

#include "cgfam/explain.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cgfam {

constexpr std::size_t kSsimTile = 8;

/// Mean SSIM over non-overlapping 8x8 tiles (edge tiles may be smaller) on
/// unit dynamic range, c1 = 0.01^2, c2 = 0.03^2.
double ssim(std::span<const double> a, std::span<const double> b, std::size_t height, std::size_t width);
double ssim(const Heatmap& a, const Heatmap& b);

/// Entry (f,g): mean SSIM over pairs with one heatmap from f and one from g;
/// within a family, distinct pairs only.
std::vector<std::vector<double>> heatmap_family_matrix(const std::vector<Heatmap>& maps,
                                                       const std::vector<std::uint32_t>& labels, std::size_t families,
                                                       std::size_t jobs = 1);

std::string family_matrix_csv(const std::vector<std::vector<double>>& m, const std::vector<std::string>& names);

}  // namespace cgfam

#include "cgfam/ssim.hpp"

#include "cgfam/common.hpp"

#include <sstream>

namespace cgfam {

double ssim(std::span<const double> a, std::span<const double> b, std::size_t height, std::size_t width) {
    if (a.size() != height * width || b.size() != height * width) throw std::invalid_argument("ssim: shape mismatch");
    if (a.empty()) throw std::invalid_argument("ssim: empty input");
    constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    std::size_t tiles = 0;
    for (std::size_t r0 = 0; r0 < height; r0 += kSsimTile) {
        for (std::size_t q0 = 0; q0 < width; q0 += kSsimTile) {
            const std::size_t r1 = std::min(r0 + kSsimTile, height), q1 = std::min(q0 + kSsimTile, width);
            const double n = static_cast<double>((r1 - r0) * (q1 - q0));
            double ma = 0, mb = 0;
            for (std::size_t r = r0; r < r1; ++r)
                for (std::size_t q = q0; q < q1; ++q) {
                    ma += a[r * width + q];
                    mb += b[r * width + q];
                }
            ma /= n;
            mb /= n;
            double va = 0, vb = 0, cov = 0;
            for (std::size_t r = r0; r < r1; ++r)
                for (std::size_t q = q0; q < q1; ++q) {
                    const double da = a[r * width + q] - ma, db = b[r * width + q] - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va /= n;
            vb /= n;
            cov /= n;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++tiles;
        }
    }
    return total / static_cast<double>(tiles);
}

double ssim(const Heatmap& a, const Heatmap& b) {
    if (a.side != b.side) throw std::invalid_argument("ssim: heatmaps differ in size");
    return ssim(a.grid, b.grid, a.side, a.side);
}

std::vector<std::vector<double>> heatmap_family_matrix(const std::vector<Heatmap>& maps,
                                                       const std::vector<std::uint32_t>& labels, std::size_t families,
                                                       std::size_t jobs) {
    if (maps.size() != labels.size()) throw std::invalid_argument("one label per heatmap required");
    std::vector<std::size_t> count(families, 0);
    for (auto l : labels) {
        if (l >= families) throw FormatError("heatmap label outside the family list");
        ++count[l];
    }
    for (std::size_t f = 0; f < families; ++f)
        if (count[f] < 2)
            throw UsageError("family " + std::to_string(f) + " has " + std::to_string(count[f]) +
                             " heatmap(s); at least 2 are needed");

    const std::size_t n = maps.size();
    // Row i accumulates pairs (i, j>i); rows are independent, so threads never share state.
    std::vector<std::vector<double>> row_sums(n, std::vector<double>(families, 0.0));
    parallel_for(n, jobs, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) row_sums[i][labels[j]] += ssim(maps[i], maps[j]);
    });
    std::vector<std::vector<double>> sum(families, std::vector<double>(families, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t g = 0; g < families; ++g) {
            const auto f = labels[i];
            sum[f][g] += row_sums[i][g];
            if (f != g) sum[g][f] += row_sums[i][g];
        }
    std::vector<std::vector<double>> m(families, std::vector<double>(families, 0.0));
    for (std::size_t f = 0; f < families; ++f)
        for (std::size_t g = 0; g < families; ++g) {
            const double pairs = f == g ? static_cast<double>(count[f]) * static_cast<double>(count[f] - 1) / 2.0
                                        : static_cast<double>(count[f]) * static_cast<double>(count[g]);
            m[f][g] = sum[f][g] / pairs;
        }
    return m;
}

std::string family_matrix_csv(const std::vector<std::vector<double>>& m, const std::vector<std::string>& names) {
    std::ostringstream os;
    os.precision(6);
    os << "family";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (std::size_t f = 0; f < m.size(); ++f) {
        os << (f < names.size() ? names[f] : std::to_string(f));
        for (double v : m[f]) os << ',' << v;
        os << '\n';
    }
    return os.str();
}

}  // namespace cgfam

#include "cgfam/supcon.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cgfam {

template <typename T>
SupConResult supcon_loss(std::span<const T> embeddings, std::size_t rows, std::size_t dim,
                         std::span<const std::uint32_t> labels, double temperature, bool with_grad) {
    if (embeddings.size() != rows * dim) throw std::invalid_argument("supcon: embedding size mismatch");
    if (labels.size() != rows) throw std::invalid_argument("supcon: one label per row required");
    if (!(temperature > 0.0)) throw std::invalid_argument("supcon: temperature must be positive");

    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Mat z(rows, dim);
    for (std::size_t i = 0; i < rows; ++i) {
        double sq = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            z(i, k) = static_cast<double>(embeddings[i * dim + k]);
            sq += z(i, k) * z(i, k);
        }
        if (std::abs(std::sqrt(sq) - 1.0) > 1e-4)
            throw std::invalid_argument("supcon: row " + std::to_string(i) + " has norm " + std::to_string(std::sqrt(sq)) +
                                        ", expected unit norm");
    }
    const Mat s = (z * z.transpose()) / temperature;

    SupConResult r;
    // coef(i,a) = d l_i / d s(i,a)
    Mat coef = Mat::Zero(rows, rows);
    for (std::size_t i = 0; i < rows; ++i) {
        std::size_t positives = 0;
        for (std::size_t a = 0; a < rows; ++a)
            if (a != i && labels[a] == labels[i]) ++positives;
        if (positives == 0) continue;
        double mx = -INFINITY;
        for (std::size_t a = 0; a < rows; ++a)
            if (a != i) mx = std::max(mx, s(i, a));
        double denom = 0.0;
        for (std::size_t a = 0; a < rows; ++a)
            if (a != i) denom += std::exp(s(i, a) - mx);
        const double lse = mx + std::log(denom);
        double pos_sum = 0.0;
        for (std::size_t a = 0; a < rows; ++a)
            if (a != i && labels[a] == labels[i]) pos_sum += s(i, a);
        r.loss += lse - pos_sum / static_cast<double>(positives);
        ++r.anchors;
        if (with_grad) {
            for (std::size_t a = 0; a < rows; ++a) {
                if (a == i) continue;
                coef(i, a) = std::exp(s(i, a) - lse);
                if (labels[a] == labels[i]) coef(i, a) -= 1.0 / static_cast<double>(positives);
            }
        }
    }
    if (with_grad) {
        // s(i,a) = z_i.z_a / t contributes to both rows.
        const Mat g = ((coef + coef.transpose()) * z) / temperature;
        r.grad.assign(g.data(), g.data() + rows * dim);
    }
    return r;
}

template SupConResult supcon_loss<float>(std::span<const float>, std::size_t, std::size_t,
                                         std::span<const std::uint32_t>, double, bool);
template SupConResult supcon_loss<double>(std::span<const double>, std::size_t, std::size_t,
                                          std::span<const std::uint32_t>, double, bool);

}  // namespace cgfam

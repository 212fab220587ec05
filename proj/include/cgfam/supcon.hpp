#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cgfam {

struct SupConResult {
    double loss = 0.0;          // summed over contributing anchors
    std::size_t anchors = 0;    // anchors with at least one positive
    std::vector<double> grad;   // d(loss)/d(embeddings), rows x dim
};

/// Supervised contrastive loss over unit-norm rows. For anchor i with
/// positives P(i) (same label, excluding i) and all others A(i):
///   l_i = -1/|P(i)| * sum_p log( exp(z_i.z_p/t) / sum_a exp(z_i.z_a/t) ).
/// Anchors without positives contribute nothing. Rows must be unit norm to
/// within 1e-4; otherwise std::invalid_argument.
template <typename T>
SupConResult supcon_loss(std::span<const T> embeddings, std::size_t rows, std::size_t dim,
                         std::span<const std::uint32_t> labels, double temperature, bool with_grad = true);

}  // namespace cgfam

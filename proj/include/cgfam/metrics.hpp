#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cgfam {

struct FamilyMetrics {
    std::string name;
    double tp = 0, fp = 0, tn = 0, fn = 0;  // averaged counts after mean_metrics
    double tpr = 0, fnr = 0, tnr = 0, fpr = 0;
    double precision = 0, recall = 0, f1 = 0;
};

struct Metrics {
    std::vector<FamilyMetrics> families;
    std::vector<std::vector<double>> confusion;  // [true][predicted]
    double total = 0, correct = 0;
    double accuracy = 0;
    double macro_f1 = 0;
};

/// One-vs-rest counts per family; every ratio with a zero denominator is 0.
Metrics compute_metrics(const std::vector<std::string>& families, std::span<const std::uint32_t> truth,
                        std::span<const std::uint32_t> predicted);

/// Element-wise mean of per-fold metrics (counts, rates and confusion).
Metrics mean_metrics(const std::vector<Metrics>& folds);

std::string metrics_json(const Metrics& m);
/// One row per family plus a macro row.
std::string metrics_csv(const Metrics& m);

}  // namespace cgfam

#include "cgfam/metrics.hpp"

#include "cgfam/common.hpp"

#include <json.hpp>

#include <sstream>

namespace cgfam {

namespace {

double ratio(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

void fill_rates(FamilyMetrics& f) {
    f.tpr = ratio(f.tp, f.tp + f.fn);
    f.fnr = ratio(f.fn, f.tp + f.fn);
    f.tnr = ratio(f.tn, f.tn + f.fp);
    f.fpr = ratio(f.fp, f.tn + f.fp);
    f.precision = ratio(f.tp, f.tp + f.fp);
    f.recall = f.tpr;
    f.f1 = ratio(2.0 * f.precision * f.recall, f.precision + f.recall);
}

}  // namespace

Metrics compute_metrics(const std::vector<std::string>& families, std::span<const std::uint32_t> truth,
                        std::span<const std::uint32_t> predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("metrics: truth and predictions differ in length");
    const std::size_t F = families.size();
    Metrics m;
    m.confusion.assign(F, std::vector<double>(F, 0.0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= F || predicted[i] >= F)
            throw FormatError("metrics: label " + std::to_string(std::max(truth[i], predicted[i])) +
                              " outside the family list");
        m.confusion[truth[i]][predicted[i]] += 1.0;
        m.correct += truth[i] == predicted[i];
    }
    m.total = static_cast<double>(truth.size());
    m.accuracy = ratio(m.correct, m.total);
    for (std::size_t f = 0; f < F; ++f) {
        FamilyMetrics fm;
        fm.name = families[f];
        double row = 0, col = 0;
        for (std::size_t g = 0; g < F; ++g) {
            row += m.confusion[f][g];
            col += m.confusion[g][f];
        }
        fm.tp = m.confusion[f][f];
        fm.fn = row - fm.tp;
        fm.fp = col - fm.tp;
        fm.tn = m.total - fm.tp - fm.fn - fm.fp;
        fill_rates(fm);
        m.macro_f1 += fm.f1 / static_cast<double>(F);
        m.families.push_back(std::move(fm));
    }
    return m;
}

Metrics mean_metrics(const std::vector<Metrics>& folds) {
    if (folds.empty()) return {};
    Metrics m = folds.front();
    const double k = static_cast<double>(folds.size());
    auto scale = [&](Metrics& x, double s) {
        x.total *= s;
        x.correct *= s;
        x.accuracy *= s;
        x.macro_f1 *= s;
        for (auto& row : x.confusion)
            for (auto& v : row) v *= s;
        for (auto& f : x.families)
            for (double* p : {&f.tp, &f.fp, &f.tn, &f.fn, &f.tpr, &f.fnr, &f.tnr, &f.fpr, &f.precision, &f.recall, &f.f1})
                *p *= s;
    };
    for (std::size_t i = 1; i < folds.size(); ++i) {
        const auto& o = folds[i];
        if (o.families.size() != m.families.size()) throw std::invalid_argument("metrics: folds disagree on families");
        m.total += o.total;
        m.correct += o.correct;
        m.accuracy += o.accuracy;
        m.macro_f1 += o.macro_f1;
        for (std::size_t r = 0; r < m.confusion.size(); ++r)
            for (std::size_t c = 0; c < m.confusion.size(); ++c) m.confusion[r][c] += o.confusion[r][c];
        for (std::size_t f = 0; f < m.families.size(); ++f) {
            auto& a = m.families[f];
            const auto& b = o.families[f];
            a.tp += b.tp, a.fp += b.fp, a.tn += b.tn, a.fn += b.fn;
            a.tpr += b.tpr, a.fnr += b.fnr, a.tnr += b.tnr, a.fpr += b.fpr;
            a.precision += b.precision, a.recall += b.recall, a.f1 += b.f1;
        }
    }
    scale(m, 1.0 / k);
    return m;
}

std::string metrics_json(const Metrics& m) {
    using nlohmann::json;
    json j;
    j["accuracy"] = m.accuracy;
    j["macro_f1"] = m.macro_f1;
    j["total"] = m.total;
    j["correct"] = m.correct;
    json fams = json::array();
    for (const auto& f : m.families)
        fams.push_back({{"family", f.name}, {"tp", f.tp},   {"fp", f.fp},        {"tn", f.tn},
                        {"fn", f.fn},       {"tpr", f.tpr}, {"fnr", f.fnr},      {"tnr", f.tnr},
                        {"fpr", f.fpr},     {"precision", f.precision}, {"recall", f.recall}, {"f1", f.f1}});
    j["families"] = fams;
    j["confusion"] = m.confusion;
    return j.dump(1);
}

std::string metrics_csv(const Metrics& m) {
    std::ostringstream os;
    os.precision(6);
    os << "family,tp,fp,tn,fn,tpr,fnr,tnr,fpr,precision,recall,f1\n";
    for (const auto& f : m.families)
        os << f.name << ',' << f.tp << ',' << f.fp << ',' << f.tn << ',' << f.fn << ',' << f.tpr << ',' << f.fnr
           << ',' << f.tnr << ',' << f.fpr << ',' << f.precision << ',' << f.recall << ',' << f.f1 << '\n';
    os << "macro,,,,,,,,,,," << m.macro_f1 << '\n';
    os << "accuracy,,,,,,,,,,," << m.accuracy << '\n';
    return os.str();
}

}  // namespace cgfam

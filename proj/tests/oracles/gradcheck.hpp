#pragma once
// Central finite differences over every encoder parameter in float64.

#include "cgfam/nnet/encoder.hpp"
#include "cgfam/supcon.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace oracle {

struct GroupError {
    std::string name;
    double rel = 0.0;
};

struct GradCheck {
    std::vector<GroupError> groups;  // parameter tensors, then "input"
    double worst = 0.0;
};

// Scalar objective: SupCon over normalised embeddings (labels pair up rows),
// plus a fixed random linear probe of the raw embeddings so every output
// coordinate carries gradient.
struct Objective {
    std::vector<std::uint32_t> labels;
    std::vector<double> probe;
    double temperature = 0.5;

    double value(const std::vector<double>& e, std::size_t rows, std::size_t dim) const {
        auto u = cgfam::nn::normalize_embeddings<double>(e, rows, dim);
        double v = cgfam::supcon_loss<double>(u, rows, dim, labels, temperature, false).loss;
        for (std::size_t i = 0; i < e.size(); ++i) v += probe[i] * e[i];
        return v;
    }
    std::vector<double> grad(const std::vector<double>& e, std::size_t rows, std::size_t dim) const {
        auto u = cgfam::nn::normalize_embeddings<double>(e, rows, dim);
        auto r = cgfam::supcon_loss<double>(u, rows, dim, labels, temperature, true);
        auto g = cgfam::nn::normalize_backward<double>(e, r.grad, rows, dim);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += probe[i];
        return g;
    }
};

// Norms below kAbsFloor are treated as zero: in train mode the fc bias feeds
// straight into batch norm, so its exact gradient vanishes and the central
// difference is pure round-off (~1e-10).
constexpr double kAbsFloor = 1e-5;

inline double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double scale = std::max({std::sqrt(na), std::sqrt(nb), kAbsFloor});
    return std::sqrt(diff) / scale;
}

inline GradCheck check_encoder(cgfam::nn::Encoder<double>& enc, const std::vector<double>& input, std::size_t batch,
                               cgfam::nn::Mode mode, const Objective& obj, double step = 1e-5) {
    using namespace cgfam::nn;
    const std::size_t dim = enc.config().embed_dim;
    auto run = [&](const std::vector<double>& x) {
        auto c = mode == Mode::train ? enc.forward(x, batch, mode) : enc.forward_eval(x, batch);
        return c;
    };
    auto cache = run(input);
    const auto analytic = enc.backward(cache, obj.grad(cache.embeddings, batch, dim));

    GradCheck out;
    const std::size_t groups = enc.params().size();
    for (std::size_t p = 0; p < groups; ++p) {
        std::vector<double> numeric(enc.params()[p].value.size());
        for (std::size_t i = 0; i < numeric.size(); ++i) {
            const double keep = enc.params()[p].value[i];
            enc.mutable_params()[p].value[i] = keep + step;
            const double up = obj.value(run(input).embeddings, batch, dim);
            enc.mutable_params()[p].value[i] = keep - step;
            const double down = obj.value(run(input).embeddings, batch, dim);
            enc.mutable_params()[p].value[i] = keep;
            numeric[i] = (up - down) / (2 * step);
        }
        const double r = rel_error(analytic.params[p], numeric);
        out.groups.push_back({enc.params()[p].name, r});
        out.worst = std::max(out.worst, r);
    }
    std::vector<double> numeric(input.size());
    auto x = input;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + step;
        const double up = obj.value(run(x).embeddings, batch, dim);
        x[i] = keep - step;
        const double down = obj.value(run(x).embeddings, batch, dim);
        x[i] = keep;
        numeric[i] = (up - down) / (2 * step);
    }
    const double r = rel_error(analytic.input, numeric);
    out.groups.push_back({"input", r});
    out.worst = std::max(out.worst, r);
    return out;
}

}  // namespace oracle

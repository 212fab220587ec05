#pragma once
// Independent reference computations. Deliberately naive: dense matrices,
// Floyd-Warshall, explicit series and direct summation.

#include "cgfam/callgraph.hpp"
#include "cgfam/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// Symmetric 0/1 matrix of the call graph; a self-loop sets the diagonal.
inline Dense undirected(const cgfam::CallGraph& g) {
    const std::size_t n = g.node_count();
    Dense a(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges()) {
        a[e.src][e.dst] = 1.0;
        a[e.dst][e.src] = 1.0;
    }
    return a;
}

inline std::vector<double> degree(const Dense& a) {
    const std::size_t n = a.size();
    std::vector<double> out(n, 0.0);
    if (n <= 1) return out;
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d += a[i][j];
        out[i] = d / static_cast<double>(n - 1);
    }
    return out;
}

inline Dense distances(const Dense& a) {
    const std::size_t n = a.size();
    const double inf = std::numeric_limits<double>::infinity();
    Dense d(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && a[i][j] != 0.0) d[i][j] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

inline std::vector<double> closeness(const Dense& a) {
    const auto d = distances(a);
    const std::size_t n = a.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0, s = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && std::isfinite(d[i][j])) {
                r += 1;
                s += d[i][j];
            }
        if (r > 0) out[i] = (r / static_cast<double>(n - 1)) * (r / s);
    }
    return out;
}

inline std::vector<double> harmonic(const Dense& a) {
    const auto d = distances(a);
    const std::size_t n = a.size();
    std::vector<double> out(n, 0.0);
    if (n <= 1) return out;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && std::isfinite(d[i][j])) s += 1.0 / d[i][j];
        out[i] = s / static_cast<double>(n - 1);
    }
    return out;
}

inline std::vector<double> matvec(const Dense& a, const std::vector<double>& x) {
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

inline double l2(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Same attenuation rule as the library: 100 normalised power steps from ones.
inline double katz_alpha(const Dense& a, double alpha) {
    std::vector<double> x(a.size(), 1.0);
    double lambda = 0;
    for (int k = 0; k < 100; ++k) {
        auto y = matvec(a, x);
        const double nx = l2(x), ny = l2(y);
        if (nx == 0 || ny == 0) {
            lambda = 0;
            break;
        }
        lambda = ny / nx;
        for (auto& v : y) v /= ny;
        x = y;
    }
    return alpha * lambda >= 0.95 ? 0.85 / lambda : alpha;
}

// Explicit series sum_{k>=1} alpha^k A^k 1, then unit Euclidean norm.
inline std::vector<double> katz(const Dense& a, double alpha, int terms = 4000) {
    const std::size_t n = a.size();
    std::vector<double> walk(n, 1.0), s(n, 0.0);  // walk = alpha^k A^k 1
    for (int k = 1; k <= terms; ++k) {
        walk = matvec(a, walk);
        double biggest = 0;
        for (std::size_t i = 0; i < n; ++i) {
            walk[i] *= alpha;
            s[i] += walk[i];
            biggest = std::max(biggest, walk[i]);
        }
        if (biggest < 1e-18) break;
    }
    const double norm = l2(s);
    if (norm > 0)
        for (auto& v : s) v /= norm;
    return s;
}

// Sum over anchors of -1/|P| sum_p log(exp(s_ip) / sum_{a != i} exp(s_ia)),
// written without any stabilisation.
inline double supcon(const std::vector<double>& z, std::size_t rows, std::size_t dim,
                     const std::vector<std::uint32_t>& labels, double t) {
    double total = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        auto dot = [&](std::size_t p, std::size_t q) {
            double s = 0;
            for (std::size_t k = 0; k < dim; ++k) s += z[p * dim + k] * z[q * dim + k];
            return s;
        };
        double denom = 0;
        for (std::size_t a = 0; a < rows; ++a)
            if (a != i) denom += std::exp(dot(i, a) / t);
        double acc = 0;
        int positives = 0;
        for (std::size_t p = 0; p < rows; ++p) {
            if (p == i || labels[p] != labels[i]) continue;
            acc += std::log(std::exp(dot(i, p) / t) / denom);
            ++positives;
        }
        if (positives) total += -acc / positives;
    }
    return total;
}

inline cgfam::ApiRegistry test_registry(std::size_t n) {
    std::vector<std::string> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back("test.Api.call" + std::to_string(i));
    return cgfam::ApiRegistry(e);
}

// Random directed graph with up to `max_nodes` nodes, a random subset of them
// sensitive; sparse enough to be disconnected most of the time.
inline cgfam::CallGraph random_graph(const cgfam::ApiRegistry& reg, cgfam::Rng& rng, std::size_t max_nodes = 50) {
    using namespace cgfam;
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(max_nodes)));
    const auto apis = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(std::min(n, reg.size()))));
    std::vector<std::uint32_t> rows(reg.size());
    for (std::uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
    shuffle(rows, rng);
    GraphBuilder b(reg);
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < apis)
            ids.push_back(b.add_api("api" + std::to_string(i), reg.at(rows[i])));
        else
            ids.push_back(b.add_user("u" + std::to_string(i)));
    }
    shuffle(ids, rng);
    const double p = uniform(rng, 0.0, 0.15);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j ? uniform01(rng) < 0.02 : uniform01(rng) < p) b.add_edge(ids[i], ids[j]);
        }
    return std::move(b).build();
}

}  // namespace oracle

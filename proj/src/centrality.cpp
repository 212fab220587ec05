#include "cgfam/centrality.hpp"

#include "cgfam/common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cgfam {

std::string_view to_string(CentralityKind k) {
    switch (k) {
        case CentralityKind::degree: return "degree";
        case CentralityKind::katz: return "katz";
        case CentralityKind::closeness: return "closeness";
        case CentralityKind::harmonic: return "harmonic";
    }
    return "?";
}

std::vector<double> degree_centrality(const Adjacency& adj) {
    const std::size_t n = adj.size();
    std::vector<double> out(n, 0.0);
    if (n <= 1) return out;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<double>(adj.simple_degree(i)) / static_cast<double>(n - 1);
    return out;
}

namespace {

// y = A x on the symmetric adjacency (self-loops counted once).
void multiply(const Adjacency& adj, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t n = adj.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (auto j : adj.neighbors(i)) acc += x[j];
        y[i] = acc;
    }
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double spectral_radius_estimate(const Adjacency& adj, int steps) {
    const std::size_t n = adj.size();
    if (n == 0 || adj.targets.empty()) return 0.0;
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
    double lambda = 0.0;
    for (int s = 0; s < steps; ++s) {
        multiply(adj, x, y);
        double ny = norm2(y);
        if (ny == 0.0) return 0.0;
        lambda = ny;  // x has unit norm
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    }
    return lambda;
}

double effective_katz_alpha(const Adjacency& adj, const KatzParams& p) {
    if (!(p.alpha > 0.0)) throw NumericError("Katz alpha must be positive");
    const double lambda = spectral_radius_estimate(adj);
    if (p.alpha * lambda >= 0.95) return 0.85 / lambda;
    return p.alpha;
}

std::vector<double> katz_centrality(const Adjacency& adj, const KatzParams& p) {
    if (!(p.tolerance > 0.0) || p.max_iterations <= 0) throw NumericError("invalid Katz parameters");
    const std::size_t n = adj.size();
    std::vector<double> s(n, 0.0);
    if (n == 0 || adj.targets.empty()) return s;

    const double alpha = effective_katz_alpha(adj, p);
    std::vector<double> shifted(n), next(n);
    double residual = 0.0;
    bool settled = false;
    for (int it = 0; it < p.max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) shifted[i] = 1.0 + s[i];
        multiply(adj, shifted, next);
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] *= alpha;
            residual = std::max(residual, std::abs(next[i] - s[i]));
        }
        s.swap(next);
        if (!std::isfinite(residual)) break;
        if (residual < p.tolerance) {
            settled = true;
            break;
        }
    }
    if (!settled) {
        std::ostringstream os;
        os << "Katz iteration did not converge after " << p.max_iterations << " iterations (alpha=" << alpha
           << ", residual=" << residual << ")";
        throw NumericError(os.str());
    }
    const double norm = norm2(s);
    if (norm > 0.0)
        for (double& v : s) v = std::min(1.0, v / norm);
    return s;
}

ReachSummary reach_from(const Adjacency& adj, std::uint32_t source, std::vector<std::int32_t>& dist) {
    const std::size_t n = adj.size();
    dist.assign(n, -1);
    ReachSummary r;
    std::vector<std::uint32_t> frontier{source}, next;
    dist[source] = 0;
    std::int32_t d = 0;
    while (!frontier.empty()) {
        ++d;
        next.clear();
        for (auto u : frontier) {
            for (auto v : adj.neighbors(u)) {
                if (dist[v] >= 0) continue;
                dist[v] = d;
                next.push_back(v);
            }
        }
        r.reachable += next.size();
        r.distance_sum += static_cast<std::uint64_t>(d) * next.size();
        r.inverse_distance_sum += static_cast<double>(next.size()) / d;
        frontier.swap(next);
    }
    return r;
}

double closeness_value(const ReachSummary& r, std::size_t n) {
    if (n <= 1 || r.reachable == 0) return 0.0;
    const double reach = static_cast<double>(r.reachable);
    return (reach / static_cast<double>(n - 1)) * (reach / static_cast<double>(r.distance_sum));
}

double harmonic_value(const ReachSummary& r, std::size_t n) {
    if (n <= 1) return 0.0;
    return r.inverse_distance_sum / static_cast<double>(n - 1);
}

std::vector<double> closeness_centrality(const Adjacency& adj) {
    const std::size_t n = adj.size();
    std::vector<double> out(n, 0.0);
    std::vector<std::int32_t> scratch;
    for (std::uint32_t i = 0; i < n; ++i) out[i] = closeness_value(reach_from(adj, i, scratch), n);
    return out;
}

std::vector<double> harmonic_centrality(const Adjacency& adj) {
    const std::size_t n = adj.size();
    std::vector<double> out(n, 0.0);
    std::vector<std::int32_t> scratch;
    for (std::uint32_t i = 0; i < n; ++i) out[i] = harmonic_value(reach_from(adj, i, scratch), n);
    return out;
}

CentralityProfile::CentralityProfile(std::size_t rows, std::uint64_t registry_hash)
    : rows_(rows), registry_hash_(registry_hash), values_(rows * kCentralityKinds, 0.0) {}

std::uint64_t CentralityProfile::digest() const {
    Digest d;
    d.u64(rows_).u64(registry_hash_);
    for (double v : values_) d.f64(v);
    return d.value();
}

CentralityProfile profile(const CallGraph& g, const ApiRegistry& registry, const KatzParams& p) {
    if (g.registry_hash() != registry.content_hash())
        throw HashMismatchError("graph was loaded against a different API registry");
    CentralityProfile out(registry.size(), registry.content_hash());
    if (g.sensitive_count() == 0) return out;

    const Adjacency adj = undirected_view(g);
    const std::size_t n = adj.size();
    const std::vector<double> katz = katz_centrality(adj, p);
    std::vector<std::int32_t> scratch;
    for (std::uint32_t api = 0; api < registry.size(); ++api) {
        auto node = g.sensitive_node(api);
        if (!node) continue;
        const auto i = *node;
        const ReachSummary r = reach_from(adj, i, scratch);
        out.at(api, CentralityKind::degree) =
            n <= 1 ? 0.0 : static_cast<double>(adj.simple_degree(i)) / static_cast<double>(n - 1);
        out.at(api, CentralityKind::katz) = katz[i];
        out.at(api, CentralityKind::closeness) = closeness_value(r, n);
        out.at(api, CentralityKind::harmonic) = harmonic_value(r, n);
    }
    return out;
}

namespace {
constexpr char kProfileMagic[4] = {'C', 'G', 'F', 'P'};
constexpr std::uint32_t kProfileVersion = 1;
}  // namespace

std::string encode_profile(const CentralityProfile& p) {
    std::ostringstream os;
    BinaryWriter w(os);
    w.raw(kProfileMagic, 4);
    w.u32(kProfileVersion);
    w.u32(static_cast<std::uint32_t>(p.rows()));
    w.u64(p.registry_hash());
    for (double v : p.values()) w.f64(v);
    return os.str();
}

CentralityProfile decode_profile(std::string_view bytes, const ApiRegistry& registry) {
    std::istringstream is{std::string(bytes)};
    BinaryReader r(is);
    char magic[4];
    r.raw(magic, 4);
    if (!std::equal(magic, magic + 4, kProfileMagic)) throw FormatError("not a profile cache file");
    if (r.u32() != kProfileVersion) throw FormatError("unsupported profile cache version");
    const std::uint32_t rows = r.u32();
    const std::uint64_t hash = r.u64();
    if (hash != registry.content_hash() || rows != registry.size())
        throw HashMismatchError("profile cache was built against a different API registry");
    CentralityProfile p(rows, hash);
    for (double& v : p.values()) v = r.f64();
    return p;
}

}  // namespace cgfam

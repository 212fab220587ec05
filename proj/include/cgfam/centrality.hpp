#pragma once

#include "cgfam/callgraph.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cgfam {

/// Column order of a profile row and of the four pixels of one API.
enum class CentralityKind : std::uint8_t { degree = 0, katz = 1, closeness = 2, harmonic = 3 };
inline constexpr std::size_t kCentralityKinds = 4;
std::string_view to_string(CentralityKind k);

struct KatzParams {
    double alpha = 0.1;
    double tolerance = 1e-9;  // max-norm residual between iterates
    int max_iterations = 1000;
};

// All measures below operate on the undirected view and return one value per
// node, each in [0,1].

/// deg(i)/(N-1), self-loops not counted; zero when N <= 1.
std::vector<double> degree_centrality(const Adjacency& adj);

/// Norm of A x / norm of x after `steps` power-iteration steps from the ones vector.
double spectral_radius_estimate(const Adjacency& adj, int steps = 100);

/// Attenuation actually used: p.alpha, or 0.85/lambda when p.alpha*lambda >= 0.95.
double effective_katz_alpha(const Adjacency& adj, const KatzParams& p);

/// Fixed point of s = alpha*A*(1+s) divided by its Euclidean norm.
/// Throws NumericError when the iteration does not settle.
std::vector<double> katz_centrality(const Adjacency& adj, const KatzParams& p);

/// Reachable-set closeness: (|R|/(N-1)) * (|R| / sum of distances).
std::vector<double> closeness_centrality(const Adjacency& adj);

/// Sum of 1/d over reachable nodes, divided by N-1.
std::vector<double> harmonic_centrality(const Adjacency& adj);

struct ReachSummary {
    std::size_t reachable = 0;          // excludes the source
    std::uint64_t distance_sum = 0;
    double inverse_distance_sum = 0.0;  // accumulated in BFS order
};
ReachSummary reach_from(const Adjacency& adj, std::uint32_t source, std::vector<std::int32_t>& scratch);
double closeness_value(const ReachSummary& r, std::size_t n);
double harmonic_value(const ReachSummary& r, std::size_t n);

/// S x 4 matrix of centralities of the registry's APIs in one graph. Rows of
/// APIs the graph never calls are zero.
class CentralityProfile {
public:
    CentralityProfile() = default;
    CentralityProfile(std::size_t rows, std::uint64_t registry_hash);

    std::size_t rows() const noexcept { return rows_; }
    std::uint64_t registry_hash() const noexcept { return registry_hash_; }
    double at(std::size_t api, CentralityKind k) const { return values_.at(api * 4 + static_cast<std::size_t>(k)); }
    double& at(std::size_t api, CentralityKind k) { return values_.at(api * 4 + static_cast<std::size_t>(k)); }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }
    std::uint64_t digest() const;

    bool operator==(const CentralityProfile&) const = default;

private:
    std::size_t rows_ = 0;
    std::uint64_t registry_hash_ = 0;
    std::vector<double> values_;
};

CentralityProfile profile(const CallGraph& g, const ApiRegistry& registry, const KatzParams& p = {});

/// Binary cache: "CGFP", version, S, registry hash, then S*4 little-endian doubles.
std::string encode_profile(const CentralityProfile& p);
CentralityProfile decode_profile(std::string_view bytes, const ApiRegistry& registry);

}  // namespace cgfam

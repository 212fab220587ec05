#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cgfam {

/// Ordered list of sensitive API signatures. Position i of a signature is its
/// row in every centrality profile and therefore fixes the pixel layout.
class ApiRegistry {
public:
    explicit ApiRegistry(std::vector<std::string> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<std::string>& entries() const noexcept { return entries_; }
    const std::string& at(std::size_t i) const { return entries_.at(i); }
    std::optional<std::uint32_t> index_of(std::string_view signature) const;
    std::uint64_t content_hash() const noexcept { return hash_; }

    /// Entries belonging to the crypto/reflection family (string decryption
    /// and dynamic loading routines), in registry order.
    std::vector<std::uint32_t> crypto_indices() const;

private:
    std::vector<std::string> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::uint64_t hash_ = 0;
};

/// Parses the line-per-signature registry format. Blank lines and lines
/// starting with '#' are skipped.
ApiRegistry load_registry(std::string_view document);

/// Built-in desk-scale registry (64 signatures).
const ApiRegistry& default_registry();
std::string_view default_registry_document();

bool is_crypto_signature(std::string_view signature);

enum class NodeKind : std::uint8_t { user_function, sensitive_api, other_api };

struct Node {
    std::string id;
    NodeKind kind = NodeKind::user_function;
    std::int32_t api_index = -1;  // registry row, sensitive_api only
    std::string signature;        // empty for user functions

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Directed call graph. Edges are a sorted set of node-index pairs. The graph
/// is immutable once built; use GraphBuilder to construct one.
class CallGraph {
public:
    CallGraph() = default;

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Node& node(std::size_t i) const { return nodes_.at(i); }
    std::uint64_t registry_hash() const noexcept { return registry_hash_; }

    std::optional<std::uint32_t> find(std::string_view id) const;
    /// Node carrying registry row `api_index`, if the graph calls it.
    std::optional<std::uint32_t> sensitive_node(std::uint32_t api_index) const;
    std::size_t sensitive_count() const noexcept { return sensitive_.size(); }

    bool operator==(const CallGraph& o) const {
        return registry_hash_ == o.registry_hash_ && nodes_ == o.nodes_ && edges_ == o.edges_;
    }

private:
    friend class GraphBuilder;

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::uint64_t registry_hash_ = 0;
    std::unordered_map<std::string, std::uint32_t> by_id_;
    std::unordered_map<std::uint32_t, std::uint32_t> sensitive_;  // api_index -> node
};

class GraphBuilder {
public:
    explicit GraphBuilder(const ApiRegistry& registry);
    /// Starts from a copy of `g`; `registry` must be the one g was built with.
    GraphBuilder(const ApiRegistry& registry, const CallGraph& g);

    std::uint32_t add_user(std::string id);
    /// API node; tagged sensitive iff the signature is in the registry.
    std::uint32_t add_api(std::string id, std::string signature);
    void add_edge(std::uint32_t src, std::uint32_t dst);
    bool has_edge(std::uint32_t src, std::uint32_t dst) const;

    std::size_t node_count() const noexcept { return g_.nodes_.size(); }
    const Node& node(std::size_t i) const { return g_.nodes_.at(i); }
    std::optional<std::uint32_t> find(std::string_view id) const;
    std::optional<std::uint32_t> sensitive_node(std::uint32_t api_index) const;

    CallGraph build() &&;

private:
    std::uint32_t push(Node n);

    const ApiRegistry* registry_;
    CallGraph g_;
    std::vector<Edge> pending_;
};

/// Loads the JSON call-graph document (`version: 1`, `nodes`, `edges`).
CallGraph load_graph(std::string_view document, const ApiRegistry& registry);
std::string serialize_graph(const CallGraph& g);

/// Symmetric adjacency in CSR form. Neighbor lists are sorted and unique; a
/// self-loop appears once in its node's own list.
struct Adjacency {
    std::vector<std::uint32_t> offsets;  // size n+1
    std::vector<std::uint32_t> targets;

    std::size_t size() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::span<const std::uint32_t> neighbors(std::size_t i) const {
        return {targets.data() + offsets[i], targets.data() + offsets[i + 1]};
    }
    bool has_self_loop(std::size_t i) const;
    /// Neighbor count excluding the node itself.
    std::size_t simple_degree(std::size_t i) const;

    bool operator==(const Adjacency&) const = default;
};

Adjacency undirected_view(const CallGraph& g);

}  // namespace cgfam

#include "cgfam/callgraph.hpp"

#include "cgfam/common.hpp"

#include <algorithm>
#include <json.hpp>

namespace cgfam {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

ApiRegistry::ApiRegistry(std::vector<std::string> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw FormatError("registry is empty");
    Digest d;
    d.u64(entries_.size());
    for (std::uint32_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].empty()) throw FormatError("registry entry " + std::to_string(i) + " is empty");
        if (!index_.emplace(entries_[i], i).second)
            throw FormatError("duplicate signature in registry: " + entries_[i]);
        d.str(entries_[i]);
    }
    hash_ = d.value();
}

std::optional<std::uint32_t> ApiRegistry::index_of(std::string_view signature) const {
    auto it = index_.find(std::string(signature));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool is_crypto_signature(std::string_view s) {
    for (std::string_view p : {"javax.crypto.", "java.security.", "java.lang.reflect.", "dalvik.system."}) {
        if (s.starts_with(p)) return true;
    }
    return false;
}

std::vector<std::uint32_t> ApiRegistry::crypto_indices() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < entries_.size(); ++i)
        if (is_crypto_signature(entries_[i])) out.push_back(i);
    return out;
}

ApiRegistry load_registry(std::string_view document) {
    std::vector<std::string> entries;
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    while (!document.empty()) {
        ++line_no;
        auto nl = document.find('\n');
        std::string_view line = document.substr(0, nl);
        document = nl == std::string_view::npos ? std::string_view{} : document.substr(nl + 1);
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        auto [it, fresh] = seen.emplace(std::string(line), line_no);
        if (!fresh) {
            throw FormatError("duplicate signature '" + it->first + "' at line " + std::to_string(line_no) +
                              " (first seen at line " + std::to_string(it->second) + ")");
        }
        entries.emplace_back(line);
    }
    if (entries.empty()) throw FormatError("registry document contains no signatures");
    return ApiRegistry(std::move(entries));
}

std::optional<std::uint32_t> CallGraph::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> CallGraph::sensitive_node(std::uint32_t api_index) const {
    auto it = sensitive_.find(api_index);
    if (it == sensitive_.end()) return std::nullopt;
    return it->second;
}

GraphBuilder::GraphBuilder(const ApiRegistry& registry) : registry_(&registry) {
    g_.registry_hash_ = registry.content_hash();
}

GraphBuilder::GraphBuilder(const ApiRegistry& registry, const CallGraph& g) : registry_(&registry), g_(g) {
    if (g.registry_hash() != registry.content_hash())
        throw HashMismatchError("graph was built against a different API registry");
    pending_ = g.edges_;
}

std::uint32_t GraphBuilder::push(Node n) {
    const auto idx = static_cast<std::uint32_t>(g_.nodes_.size());
    if (!g_.by_id_.emplace(n.id, idx).second) throw FormatError("duplicate node id: " + n.id);
    if (n.kind == NodeKind::sensitive_api) {
        if (!g_.sensitive_.emplace(static_cast<std::uint32_t>(n.api_index), idx).second) {
            g_.by_id_.erase(n.id);
            throw FormatError("sensitive API '" + n.signature + "' appears on more than one node");
        }
    }
    g_.nodes_.push_back(std::move(n));
    return idx;
}

std::uint32_t GraphBuilder::add_user(std::string id) {
    return push(Node{std::move(id), NodeKind::user_function, -1, {}});
}

std::uint32_t GraphBuilder::add_api(std::string id, std::string signature) {
    if (signature.empty()) throw FormatError("api node '" + id + "' has an empty signature");
    Node n{std::move(id), NodeKind::other_api, -1, std::move(signature)};
    if (auto idx = registry_->index_of(n.signature)) {
        n.kind = NodeKind::sensitive_api;
        n.api_index = static_cast<std::int32_t>(*idx);
    }
    return push(std::move(n));
}

void GraphBuilder::add_edge(std::uint32_t src, std::uint32_t dst) {
    if (src >= g_.nodes_.size() || dst >= g_.nodes_.size()) throw FormatError("edge endpoint out of range");
    pending_.push_back({src, dst});
}

bool GraphBuilder::has_edge(std::uint32_t src, std::uint32_t dst) const {
    return std::find(pending_.begin(), pending_.end(), Edge{src, dst}) != pending_.end();
}

std::optional<std::uint32_t> GraphBuilder::find(std::string_view id) const { return g_.find(id); }

std::optional<std::uint32_t> GraphBuilder::sensitive_node(std::uint32_t api_index) const {
    return g_.sensitive_node(api_index);
}

CallGraph GraphBuilder::build() && {
    std::sort(pending_.begin(), pending_.end());
    pending_.erase(std::unique(pending_.begin(), pending_.end()), pending_.end());
    g_.edges_ = std::move(pending_);
    return std::move(g_);
}

CallGraph load_graph(std::string_view document, const ApiRegistry& registry) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed call-graph document: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("call-graph document must be a JSON object");
    if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"].get<int>() != 1)
        throw FormatError("call-graph document requires \"version\": 1");
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw FormatError("missing \"nodes\" array");
    if (!doc.contains("edges") || !doc["edges"].is_array()) throw FormatError("missing \"edges\" array");

    GraphBuilder b(registry);
    for (const auto& n : doc["nodes"]) {
        if (!n.is_object() || !n.contains("id") || !n["id"].is_string() || !n.contains("kind") ||
            !n["kind"].is_string())
            throw FormatError("node entries need string \"id\" and \"kind\"");
        auto id = n["id"].get<std::string>();
        auto kind = n["kind"].get<std::string>();
        if (kind == "user") {
            if (n.contains("signature")) throw FormatError("user node '" + id + "' must not carry a signature");
            b.add_user(std::move(id));
        } else if (kind == "api") {
            if (!n.contains("signature") || !n["signature"].is_string())
                throw FormatError("api node '" + id + "' requires a string signature");
            b.add_api(std::move(id), n["signature"].get<std::string>());
        } else {
            throw FormatError("node '" + id + "' has unknown kind '" + kind + "'");
        }
    }
    for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            throw FormatError("edges must be [src_id, dst_id] string pairs");
        auto src = e[0].get<std::string>();
        auto dst = e[1].get<std::string>();
        auto s = b.find(src);
        if (!s) throw FormatError("edge references undeclared node id: " + src);
        auto d = b.find(dst);
        if (!d) throw FormatError("edge references undeclared node id: " + dst);
        b.add_edge(*s, *d);
    }
    return std::move(b).build();
}

std::string serialize_graph(const CallGraph& g) {
    using nlohmann::json;
    json nodes = json::array();
    for (const auto& n : g.nodes()) {
        if (n.kind == NodeKind::user_function)
            nodes.push_back({{"id", n.id}, {"kind", "user"}});
        else
            nodes.push_back({{"id", n.id}, {"kind", "api"}, {"signature", n.signature}});
    }
    json edges = json::array();
    for (const auto& e : g.edges()) edges.push_back({g.node(e.src).id, g.node(e.dst).id});
    json doc = {{"version", 1}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
    return doc.dump(1) + "\n";
}

bool Adjacency::has_self_loop(std::size_t i) const {
    auto nb = neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(i));
}

std::size_t Adjacency::simple_degree(std::size_t i) const {
    return neighbors(i).size() - (has_self_loop(i) ? 1 : 0);
}

Adjacency undirected_view(const CallGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::uint32_t>> lists(n);
    for (const auto& e : g.edges()) {
        lists[e.src].push_back(e.dst);
        if (e.src != e.dst) lists[e.dst].push_back(e.src);
    }
    Adjacency adj;
    adj.offsets.resize(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& l = lists[i];
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        adj.offsets[i + 1] = adj.offsets[i] + static_cast<std::uint32_t>(l.size());
    }
    adj.targets.reserve(adj.offsets[n]);
    for (auto& l : lists) adj.targets.insert(adj.targets.end(), l.begin(), l.end());
    return adj;
}

}  // namespace cgfam

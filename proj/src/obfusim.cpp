#include "cgfam/obfusim.hpp"

#include "cgfam/common.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace cgfam {

namespace {

// Fresh node ids: "<prefix><n>", skipping anything already taken.
class IdSource {
public:
    IdSource(const CallGraph& g, std::string prefix) : prefix_(std::move(prefix)) {
        for (const auto& n : g.nodes()) taken_.insert(n.id);
    }
    std::string next() {
        for (;;) {
            std::string id = prefix_ + std::to_string(counter_++);
            if (taken_.insert(id).second) return id;
        }
    }

private:
    std::string prefix_;
    std::size_t counter_ = 0;
    std::unordered_set<std::string> taken_;
};

std::uint32_t add_like(GraphBuilder& b, const Node& n, std::string id) {
    if (n.kind == NodeKind::user_function) return b.add_user(std::move(id));
    return b.add_api(std::move(id), n.signature);
}

}  // namespace

CallGraph rename(const CallGraph& g, const ApiRegistry& registry, std::uint64_t seed) {
    std::vector<std::uint32_t> users;
    std::unordered_set<std::string> api_ids;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        if (g.node(i).kind == NodeKind::user_function)
            users.push_back(i);
        else
            api_ids.insert(g.node(i).id);
    }
    std::vector<std::size_t> perm(users.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(seed);
    shuffle(perm, rng);
    const std::string prefix = "obf" + hex64(mix_seed(seed, 0x5a)).substr(0, 6) + "_";

    std::vector<std::string> fresh(g.node_count());
    for (std::size_t k = 0; k < users.size(); ++k) {
        std::string id = prefix + std::to_string(perm[k]);
        while (api_ids.count(id)) id += "_";
        fresh[users[k]] = std::move(id);
    }
    GraphBuilder b(registry);
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        const Node& n = g.node(i);
        add_like(b, n, n.kind == NodeKind::user_function ? fresh[i] : n.id);
    }
    for (const auto& e : g.edges()) b.add_edge(e.src, e.dst);
    return std::move(b).build();
}

CallGraph call_indirection(const CallGraph& g, const ApiRegistry& registry, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw UsageError("call_indirection rate must lie in [0,1]");
    GraphBuilder b(registry);
    for (const auto& n : g.nodes()) add_like(b, n, n.id);
    IdSource ids(g, "indirect_");
    Rng rng(seed);
    for (const auto& e : g.edges()) {
        if (rate > 0.0 && uniform01(rng) < rate) {
            const auto w = b.add_user(ids.next());
            b.add_edge(e.src, w);
            b.add_edge(w, e.dst);
        } else {
            b.add_edge(e.src, e.dst);
        }
    }
    return std::move(b).build();
}

CallGraph junk_code(const CallGraph& g, const ApiRegistry& registry, std::size_t count, std::size_t attach_degree,
                    std::uint64_t seed) {
    if (count == 0) return g;
    std::vector<std::uint32_t> eligible;
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        if (g.node(i).kind != NodeKind::sensitive_api) eligible.push_back(i);
    if (eligible.empty()) throw UsageError("junk_code: graph has no non-sensitive node to attach junk to");

    GraphBuilder b(registry, g);
    IdSource ids(g, "junk_");
    Rng rng(seed);
    for (std::size_t k = 0; k < count; ++k) {
        const auto j = b.add_user(ids.next());
        for (std::size_t t = 0; t < attach_degree; ++t) {
            const auto target = eligible[uniform_index(rng, eligible.size())];
            const bool outgoing = b.node(target).kind == NodeKind::other_api || (rng() & 1) == 0;
            if (outgoing)
                b.add_edge(j, target);
            else
                b.add_edge(target, j);
        }
    }
    return std::move(b).build();
}

CallGraph encryption_sim(const CallGraph& g, const ApiRegistry& registry, std::size_t apis, std::uint64_t seed) {
    if (apis == 0) return g;
    std::vector<std::uint32_t> crypto = registry.crypto_indices();
    if (crypto.empty()) throw UsageError("encryption_sim: registry designates no crypto/reflection APIs");
    std::vector<std::uint32_t> users;
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        if (g.node(i).kind == NodeKind::user_function) users.push_back(i);
    if (users.empty()) throw UsageError("encryption_sim: graph has no user function to host decryption calls");

    Rng rng(seed);
    shuffle(crypto, rng);
    crypto.resize(std::min(apis, crypto.size()));

    GraphBuilder b(registry, g);
    IdSource ids(g, "crypto_");
    for (auto api : crypto) {
        std::uint32_t node;
        if (auto existing = b.sensitive_node(api)) {
            node = *existing;
        } else {
            std::string id = registry.at(api);
            if (b.find(id)) id = ids.next();
            node = b.add_api(std::move(id), registry.at(api));
        }
        std::vector<std::uint32_t> callers;
        for (auto u : users)
            if (!b.has_edge(u, node)) callers.push_back(u);
        if (!callers.empty()) b.add_edge(callers[uniform_index(rng, callers.size())], node);
    }
    return std::move(b).build();
}

Transform compose(const std::vector<Transform>& parts) {
    Transform t;
    for (const auto& p : parts) t.stages.insert(t.stages.end(), p.stages.begin(), p.stages.end());
    return t;
}

CallGraph apply(const Transform& t, const CallGraph& g, const ApiRegistry& registry, std::uint64_t seed) {
    CallGraph cur = g;
    for (std::size_t i = 0; i < t.stages.size(); ++i) {
        const auto& s = t.stages[i];
        const std::uint64_t stage_seed = mix_seed(seed, i);
        switch (s.kind) {
            case TransformKind::rename: cur = rename(cur, registry, stage_seed); break;
            case TransformKind::call_indirection: cur = call_indirection(cur, registry, s.rate, stage_seed); break;
            case TransformKind::junk_code: cur = junk_code(cur, registry, s.count, s.attach_degree, stage_seed); break;
            case TransformKind::encryption_sim: cur = encryption_sim(cur, registry, s.count, stage_seed); break;
            case TransformKind::identity: break;
        }
    }
    return cur;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        auto p = s.find(sep);
        out.push_back(s.substr(0, p));
        if (p == std::string_view::npos) break;
        s = s.substr(p + 1);
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::size_t parse_count(std::string_view s, std::string_view stage) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw UsageError("bad integer '" + std::string(s) + "' in transform stage '" + std::string(stage) + "'");
    return v;
}

double parse_rate(std::string_view s, std::string_view stage) {
    try {
        std::size_t used = 0;
        double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw UsageError("bad rate '" + std::string(s) + "' in transform stage '" + std::string(stage) + "'");
    }
}

}  // namespace

Transform parse_transform(std::string_view spec) {
    Transform t;
    if (spec.empty()) return t;
    for (auto stage : split(spec, '+')) {
        auto parts = split(stage, ':');
        const std::string name = lower(parts[0]);
        auto need = [&](std::size_t n) {
            if (parts.size() != n + 1)
                throw UsageError("transform stage '" + std::string(stage) + "' expects " + std::to_string(n) +
                                 " argument(s)");
        };
        TransformStage s;
        if (name == "rename" || name == "classrename") {
            need(0);
            s.kind = TransformKind::rename;
        } else if (name == "callind") {
            need(1);
            s.kind = TransformKind::call_indirection;
            s.rate = parse_rate(parts[1], stage);
            if (!(s.rate >= 0.0 && s.rate <= 1.0)) throw UsageError("callind rate must lie in [0,1]");
        } else if (name == "junk") {
            need(2);
            s.kind = TransformKind::junk_code;
            s.count = parse_count(parts[1], stage);
            s.attach_degree = parse_count(parts[2], stage);
        } else if (name == "enc") {
            need(1);
            s.kind = TransformKind::encryption_sim;
            s.count = parse_count(parts[1], stage);
        } else if (name == "id") {
            need(1);
            s.tag = std::string(parts[1]);
        } else if (name == "identity") {
            need(0);
        } else if (name == "nop" || name == "goto" || name == "reorder" || name == "fieldrename" ||
                   name == "methodrename") {
            need(0);
            s.tag = std::string(parts[0]);
        } else {
            throw UsageError("unknown transform stage '" + std::string(stage) + "'");
        }
        t.stages.push_back(std::move(s));
    }
    return t;
}

std::string to_string(const Transform& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.stages.size(); ++i) {
        if (i) os << '+';
        const auto& s = t.stages[i];
        switch (s.kind) {
            case TransformKind::rename: os << "rename"; break;
            case TransformKind::call_indirection: os << "callind:" << s.rate; break;
            case TransformKind::junk_code: os << "junk:" << s.count << ':' << s.attach_degree; break;
            case TransformKind::encryption_sim: os << "enc:" << s.count; break;
            case TransformKind::identity:
                if (s.tag.empty())
                    os << "identity";
                else
                    os << "id:" << s.tag;
                break;
        }
    }
    return os.str();
}

std::vector<ObfuscatorRow> obfuscator_table() {
    std::vector<ObfuscatorRow> rows = {
        {"Rename", "ClassRename", parse_transform("rename")},
        {"Rename", "FieldRename", parse_transform("id:FieldRename")},
        {"Rename", "MethodRename", parse_transform("id:MethodRename")},
        {"Encryption", "AssetEncryption", parse_transform("enc:1")},
        {"Encryption", "ConstStringEncryption", parse_transform("enc:3")},
        {"Encryption", "LibEncryption", parse_transform("enc:1")},
        {"Encryption", "ResStringEncryption", parse_transform("enc:1")},
        {"Code", "ArithmeticBranch", parse_transform("junk:20:2")},
        {"Code", "CallIndirection", parse_transform("callind:1")},
        {"Code", "Goto", parse_transform("id:Goto")},
        {"Code", "Nop", parse_transform("id:Nop")},
        {"Code", "Reorder", parse_transform("id:Reorder")},
    };
    std::vector<Transform> all;
    for (const auto& r : rows) all.push_back(r.transform);
    rows.push_back({"Combined", "Apply12Obfuscators", compose(all)});
    return rows;
}

}  // namespace cgfam

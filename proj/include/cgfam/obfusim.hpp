#pragma once

#include "cgfam/callgraph.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cgfam {

// Call-graph rewrites that mimic what bytecode obfuscators do to the static
// call graph. All are deterministic for a given seed and never remove a
// sensitive API node.

/// Replaces user-function ids through a seeded bijection; node order and
/// edges are kept, so the graph is isomorphic to the input.
CallGraph rename(const CallGraph& g, const ApiRegistry& registry, std::uint64_t seed);

/// Each edge (u,v) is independently, with probability `rate`, replaced by
/// (u,w),(w,v) through a fresh user node w.
CallGraph call_indirection(const CallGraph& g, const ApiRegistry& registry, double rate, std::uint64_t seed);

/// Adds `count` fresh user nodes, each wired with `attach_degree` edges to or
/// from uniformly chosen non-sensitive nodes of the input graph.
CallGraph junk_code(const CallGraph& g, const ApiRegistry& registry, std::size_t count, std::size_t attach_degree,
                    std::uint64_t seed);

/// Surfaces up to `apis` crypto/reflection registry APIs (adding their nodes
/// if absent), each called from one random user node.
CallGraph encryption_sim(const CallGraph& g, const ApiRegistry& registry, std::size_t apis, std::uint64_t seed);

enum class TransformKind { rename, call_indirection, junk_code, encryption_sim, identity };

struct TransformStage {
    TransformKind kind = TransformKind::identity;
    double rate = 0.0;             // call_indirection
    std::size_t count = 0;         // junk_code nodes / encryption_sim APIs
    std::size_t attach_degree = 0; // junk_code
    std::string tag;               // identity

    bool operator==(const TransformStage&) const = default;
};

/// Ordered pipeline of stages; the empty pipeline is the identity.
struct Transform {
    std::vector<TransformStage> stages;
    bool operator==(const Transform&) const = default;
};

Transform compose(const std::vector<Transform>& parts);

/// Runs the stages in order; stage i is seeded with mix_seed(seed, i).
CallGraph apply(const Transform& t, const CallGraph& g, const ApiRegistry& registry, std::uint64_t seed);

/// Spec strings: stages joined by '+'. Stage forms:
///   rename | callind:<rate> | junk:<count>:<attach_degree> | enc:<apis> |
///   id:<tag> | identity | nop | goto | reorder | fieldrename | methodrename
/// e.g. "rename+callind:0.5+junk:20:2".
Transform parse_transform(std::string_view spec);
std::string to_string(const Transform& t);

struct ObfuscatorRow {
    std::string group;  // Rename, Encryption, Code, Combined
    std::string name;
    Transform transform;
};

/// The twelve obfuscators at call-graph granularity plus the all-in-one row.
std::vector<ObfuscatorRow> obfuscator_table();

}  // namespace cgfam

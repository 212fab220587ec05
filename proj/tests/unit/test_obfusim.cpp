#include "cgfam/common.hpp"
#include "cgfam/imagegen.hpp"
#include "cgfam/obfusim.hpp"
#include "cgfam/synth.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace cgfam;

namespace {

CallGraph sample_graph(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.families = 2;
    auto specs = gen_family_specs(cfg, default_registry());
    Rng rng(seed);
    return gen_variant(specs[seed % 2], default_registry(), cfg, rng);
}

std::set<std::pair<std::uint32_t, std::uint32_t>> sensitive_pairs(const CallGraph& g) {
    auto d = oracle::distances(oracle::undirected(g));
    std::set<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::uint32_t a = 0; a < default_registry().size(); ++a)
        for (std::uint32_t b = 0; b < default_registry().size(); ++b) {
            auto na = g.sensitive_node(a), nb = g.sensitive_node(b);
            if (na && nb && std::isfinite(d[*na][*nb])) out.insert({a, b});
        }
    return out;
}

}  // namespace

TEST_CASE("rename keeps the feature image bit-identical") {
    const auto& reg = default_registry();
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto g = sample_graph(s);
        auto r = rename(g, reg, s + 100);
        CHECK(r.node_count() == g.node_count());
        CHECK(r.edges() == g.edges());
        std::size_t changed = 0;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            if (g.node(i).kind == NodeKind::user_function) changed += g.node(i).id != r.node(i).id;
            else CHECK(g.node(i).id == r.node(i).id);
        }
        CHECK(changed > 0);
        CHECK(featurize(r, reg) == featurize(g, reg));
        CHECK(rename(g, reg, s + 100) == r);
    }
}

TEST_CASE("call indirection adds one node per rewired edge and keeps reachability") {
    const auto& reg = default_registry();
    auto g = sample_graph(3);
    CHECK(call_indirection(g, reg, 0.0, 1) == g);
    auto full = call_indirection(g, reg, 1.0, 1);
    CHECK(full.node_count() == g.node_count() + g.edge_count());
    CHECK(full.edge_count() == 2 * g.edge_count());
    auto half = call_indirection(g, reg, 0.5, 2);
    CHECK(half.node_count() > g.node_count());
    CHECK(half.node_count() < g.node_count() + g.edge_count());
    for (const auto* t : {&full, &half}) {
        auto before = sensitive_pairs(g), after = sensitive_pairs(*t);
        CHECK(before == after);
        CHECK(t->sensitive_count() == g.sensitive_count());
    }
    CHECK_THROWS_AS(call_indirection(g, reg, 1.5, 1), UsageError);
}

TEST_CASE("junk code never touches sensitive nodes") {
    const auto& reg = default_registry();
    auto g = sample_graph(4);
    CHECK(junk_code(g, reg, 0, 3, 1) == g);
    auto j = junk_code(g, reg, 5, 2, 9);
    CHECK(j.node_count() == g.node_count() + 5);
    CHECK(j.edge_count() <= g.edge_count() + 10);
    auto ga = undirected_view(g), ja = undirected_view(j);
    for (std::uint32_t api = 0; api < reg.size(); ++api) {
        auto n = g.sensitive_node(api);
        if (!n) continue;
        CHECK(j.sensitive_node(api) == n);
        CHECK(ja.simple_degree(*n) == ga.simple_degree(*n));
    }
    GraphBuilder only_api(reg);
    only_api.add_api("x", reg.at(0));
    CHECK_THROWS_AS(junk_code(std::move(only_api).build(), reg, 1, 1, 1), UsageError);
}

TEST_CASE("encryption simulation surfaces crypto APIs") {
    const auto& reg = default_registry();
    auto g = sample_graph(5);
    CHECK(encryption_sim(g, reg, 0, 1) == g);
    auto e1 = encryption_sim(g, reg, 1, 3);
    CHECK(e1.node_count() <= g.node_count() + 1);
    CHECK(e1.edge_count() == g.edge_count() + 1);
    auto e3 = encryption_sim(g, reg, 3, 3);
    auto twice = encryption_sim(e3, reg, 3, 3);
    CHECK(twice.node_count() == e3.node_count());
    auto crypto = reg.crypto_indices();
    std::size_t surfaced = 0;
    for (auto c : crypto) surfaced += e3.sensitive_node(c).has_value();
    CHECK(surfaced == 3);
    CHECK_THROWS_AS(encryption_sim(g, oracle::test_registry(4), 1, 1), UsageError);
    GraphBuilder no_users(reg);
    no_users.add_api("x", reg.at(0));
    CHECK_THROWS_AS(encryption_sim(std::move(no_users).build(), reg, 1, 1), UsageError);
}

TEST_CASE("compose and spec strings") {
    const auto& reg = default_registry();
    auto g = sample_graph(6);
    CHECK(apply(compose({}), g, reg, 4) == g);
    auto r = parse_transform("rename");
    CHECK(apply(compose({r}), g, reg, 4) == apply(r, g, reg, 4));
    auto both = parse_transform("rename+callind:1");
    CHECK(apply(both, g, reg, 4).node_count() == g.node_count() + g.edge_count());

    auto t = parse_transform("rename+callind:0.5+junk:20:2+enc:3+id:Nop+goto");
    CHECK(t.stages.size() == 6);
    CHECK(parse_transform(to_string(t)) == t);
    CHECK(apply(t, g, reg, 11) == apply(t, g, reg, 11));
    for (const char* bad : {"callind", "callind:x", "junk:1", "enc:-1", "shuffle", "callind:2", "rename:1"})
        CHECK_THROWS_AS(parse_transform(bad), UsageError);
    CHECK(parse_transform("").stages.empty());
}

TEST_CASE("obfuscator table covers twelve obfuscators plus the combination") {
    auto rows = obfuscator_table();
    CHECK(rows.size() == 13);
    CHECK(rows.back().transform.stages.size() == 12);
    const auto& reg = default_registry();
    auto g = sample_graph(7);
    for (const auto& row : rows) {
        auto out = apply(row.transform, g, reg, 5);
        CHECK(out.sensitive_count() >= g.sensitive_count());
        if (row.group == "Rename") CHECK(featurize(out, reg) == featurize(g, reg));
    }
}

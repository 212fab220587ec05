#include "cgfam/centrality.hpp"
#include "cgfam/common.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace cgfam;

namespace {

CallGraph path_graph(const ApiRegistry& reg, std::size_t n) {
    GraphBuilder b(reg);
    for (std::size_t i = 0; i < n; ++i) b.add_user("n" + std::to_string(i));
    for (std::uint32_t i = 0; i + 1 < n; ++i) b.add_edge(i, i + 1);
    return std::move(b).build();
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (const double d = std::abs(a[i] - b[i]); !(d <= m)) m = d;  // NaN propagates
    return m;
}

}  // namespace

TEST_CASE("all four measures match the dense oracle on random graphs") {
    auto reg = oracle::test_registry(12);
    Rng rng(11);
    for (int trial = 0; trial < 120; ++trial) {
        auto g = oracle::random_graph(reg, rng);
        auto adj = undirected_view(g);
        auto a = oracle::undirected(g);
        CHECK(max_diff(degree_centrality(adj), oracle::degree(a)) <= 1e-12);
        CHECK(max_diff(closeness_centrality(adj), oracle::closeness(a)) <= 1e-12);
        CHECK(max_diff(harmonic_centrality(adj), oracle::harmonic(a)) <= 1e-12);
        KatzParams kp;
        const double alpha = oracle::katz_alpha(a, kp.alpha);
        CHECK(effective_katz_alpha(adj, kp) == doctest::Approx(alpha).epsilon(1e-12));
        CHECK(max_diff(katz_centrality(adj, kp), oracle::katz(a, alpha)) <= 1e-7);
    }
}

TEST_CASE("profile rows follow the registry and are zero for absent APIs") {
    auto reg = oracle::test_registry(12);
    Rng rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        auto g = oracle::random_graph(reg, rng);
        auto p = profile(g, reg);
        auto a = oracle::undirected(g);
        const double alpha = oracle::katz_alpha(a, 0.1);
        const auto deg = oracle::degree(a), clo = oracle::closeness(a), har = oracle::harmonic(a),
                   kz = oracle::katz(a, alpha);
        for (std::uint32_t api = 0; api < reg.size(); ++api) {
            auto node = g.sensitive_node(api);
            for (std::size_t k = 0; k < 4; ++k) {
                const auto kind = static_cast<CentralityKind>(k);
                const double v = p.at(api, kind);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0 + 1e-12);
                if (!node) {
                    CHECK(v == 0.0);
                    continue;
                }
                const double expect = k == 0 ? deg[*node] : k == 1 ? kz[*node] : k == 2 ? clo[*node] : har[*node];
                CHECK(std::abs(v - expect) <= 1e-7);
            }
        }
    }
}

TEST_CASE("closed-form values on small graphs") {
    auto reg = oracle::test_registry(2);
    SUBCASE("single node") {
        GraphBuilder b(reg);
        b.add_api("x", reg.at(0));
        auto adj = undirected_view(std::move(b).build());
        CHECK(degree_centrality(adj)[0] == 0.0);
        CHECK(closeness_centrality(adj)[0] == 0.0);
        CHECK(harmonic_centrality(adj)[0] == 0.0);
        CHECK(katz_centrality(adj, {})[0] == 0.0);
    }
    SUBCASE("path of three") {
        auto adj = undirected_view(path_graph(reg, 3));
        CHECK(degree_centrality(adj)[1] == doctest::Approx(1.0));
        CHECK(closeness_centrality(adj)[0] == doctest::Approx(2.0 / 3.0));
        CHECK(harmonic_centrality(adj)[0] == doctest::Approx(0.75));
        // s = a A (1 + s): ends e, middle m with e = a(1+m), m = 2a(1+e)
        const double a = 0.1, m = 2 * a * (1 + a) / (1 - 2 * a * a), e = a * (1 + m);
        const double norm = std::sqrt(2 * e * e + m * m);
        auto kz = katz_centrality(adj, {});
        CHECK(kz[0] == doctest::Approx(e / norm).epsilon(1e-9));
        CHECK(kz[1] == doctest::Approx(m / norm).epsilon(1e-9));
    }
    SUBCASE("self-loops do not count toward degree") {
        GraphBuilder b(reg);
        b.add_user("a");
        b.add_user("b");
        b.add_edge(0, 0);
        b.add_edge(0, 1);
        auto adj = undirected_view(std::move(b).build());
        CHECK(degree_centrality(adj)[0] == 1.0);
        CHECK(adj.has_self_loop(0));
        CHECK(adj.simple_degree(0) == 1);
    }
}

TEST_CASE("katz attenuation falls back on dense graphs") {
    auto reg = oracle::test_registry(1);
    GraphBuilder b(reg);
    const std::size_t n = 20;
    for (std::size_t i = 0; i < n; ++i) b.add_user("n" + std::to_string(i));
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) b.add_edge(i, j);
    auto adj = undirected_view(std::move(b).build());
    // complete graph: lambda = n - 1 = 19, 0.1 * 19 >= 0.95
    CHECK(spectral_radius_estimate(adj) == doctest::Approx(19.0));
    CHECK(effective_katz_alpha(adj, {}) == doctest::Approx(0.85 / 19.0));
    auto kz = katz_centrality(adj, {});
    for (double v : kz) CHECK(v == doctest::Approx(1.0 / std::sqrt(static_cast<double>(n))));
    KatzParams tight;
    tight.max_iterations = 2;
    CHECK_THROWS_AS(katz_centrality(adj, tight), NumericError);
}

TEST_CASE("profile cache round-trips and checks the registry") {
    auto reg = oracle::test_registry(6);
    Rng rng(2);
    auto g = oracle::random_graph(reg, rng);
    auto p = profile(g, reg);
    auto q = decode_profile(encode_profile(p), reg);
    CHECK(q == p);
    CHECK(q.digest() == p.digest());
    CHECK_THROWS_AS(decode_profile(encode_profile(p), oracle::test_registry(7)), HashMismatchError);
    auto bytes = encode_profile(p);
    bytes.resize(bytes.size() - 3);
    CHECK_THROWS_AS(decode_profile(bytes, reg), FormatError);
    CHECK_THROWS_AS(profile(g, oracle::test_registry(7)), HashMismatchError);
}

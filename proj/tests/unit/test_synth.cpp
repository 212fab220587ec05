#include "cgfam/common.hpp"
#include "cgfam/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace cgfam;

TEST_CASE("family specs respect the overlap budget and are deterministic") {
    const auto& reg = default_registry();
    SynthConfig cfg;
    auto a = gen_family_specs(cfg, reg);
    CHECK(a == gen_family_specs(cfg, reg));
    CHECK(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].signature_apis.size() == cfg.signature_size);
        CHECK(a[i].scaffold_min > 0);
        CHECK(a[i].scaffold_max >= a[i].scaffold_min);
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            std::size_t shared = 0;
            for (auto x : a[i].signature_apis)
                shared += std::count(a[j].signature_apis.begin(), a[j].signature_apis.end(), x);
            CHECK(shared <= cfg.overlap_budget);
        }
    }
    SynthConfig two;
    two.families = 2;
    two.overlap_budget = 0;
    auto b = gen_family_specs(two, reg);
    for (auto x : b[0].signature_apis)
        CHECK(std::find(b[1].signature_apis.begin(), b[1].signature_apis.end(), x) == b[1].signature_apis.end());
    SynthConfig huge;
    huge.families = 40;
    huge.overlap_budget = 0;
    CHECK_THROWS_AS(gen_family_specs(huge, reg), UsageError);
    SynthConfig one;
    one.families = 1;
    CHECK_THROWS_AS(gen_family_specs(one, reg), UsageError);
}

TEST_CASE("variants carry every signature API and vary in size") {
    const auto& reg = default_registry();
    SynthConfig cfg;
    auto specs = gen_family_specs(cfg, reg);
    std::vector<std::size_t> sizes;
    for (std::size_t v = 0; v < 20; ++v) {
        Rng rng(variant_seed(cfg.seed, 0, v));
        auto g = gen_variant(specs[0], reg, cfg, rng);
        for (auto api : specs[0].signature_apis) CHECK(g.sensitive_node(api).has_value());
        sizes.push_back(g.node_count());
        Rng again(variant_seed(cfg.seed, 0, v));
        CHECK(gen_variant(specs[0], reg, cfg, again) == g);
    }
    std::sort(sizes.begin(), sizes.end());
    CHECK(std::unique(sizes.begin(), sizes.end()) - sizes.begin() > 5);
}

TEST_CASE("datasets are uniform, reproducible and parallel-safe") {
    const auto& reg = default_registry();
    SynthConfig cfg;
    cfg.families = 4;
    cfg.variants = 25;
    auto a = gen_dataset(cfg, reg, 1);
    auto b = gen_dataset(cfg, reg, 3);
    CHECK(a.size() == 100);
    CHECK(a.digest() == b.digest());
    std::vector<int> hist(4, 0);
    for (auto l : a.labels()) ++hist[l];
    for (int h : hist) CHECK(h == 25);
    cfg.seed = 2;
    CHECK(gen_dataset(cfg, reg).digest() != a.digest());
    auto specs = gen_family_specs(cfg, reg);
    auto manifest = dataset_manifest(cfg, specs, a);
    CHECK(manifest.find("\"items\"") != std::string::npos);
}

TEST_CASE("nearest centroid on raw images beats chance") {
    const auto& reg = default_registry();
    SynthConfig cfg;
    cfg.variants = 40;
    auto ds = gen_dataset(cfg, reg);
    const std::size_t F = cfg.families, P = ds.samples[0].image.pixels.size();
    std::vector<std::vector<double>> centroid(F, std::vector<double>(P, 0.0));
    // centroids from even items, evaluated on odd items
    for (std::size_t i = 0; i < ds.size(); i += 2)
        for (std::size_t p = 0; p < P; ++p) centroid[ds.samples[i].label][p] += ds.samples[i].image.pixels[p];
    std::size_t right = 0, total = 0;
    for (std::size_t i = 1; i < ds.size(); i += 2, ++total) {
        std::size_t best = 0;
        double best_d = INFINITY;
        for (std::size_t f = 0; f < F; ++f) {
            double d = 0;
            for (std::size_t p = 0; p < P; ++p) {
                const double c = centroid[f][p] / (cfg.variants / 2.0);
                d += (c - ds.samples[i].image.pixels[p]) * (c - ds.samples[i].image.pixels[p]);
            }
            if (d < best_d) best_d = d, best = f;
        }
        right += best == ds.samples[i].label;
    }
    CHECK(static_cast<double>(right) / total > 2.0 / F);
}

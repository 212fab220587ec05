#include "cgfam/synth.hpp"

#include "cgfam/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <limits>

namespace cgfam {

namespace {

constexpr std::array<const char*, 24> kLibraryApis = {
    "java.lang.String.valueOf",        "java.lang.StringBuilder.append",  "java.lang.StringBuilder.toString",
    "java.lang.Integer.parseInt",      "java.util.ArrayList.add",         "java.util.ArrayList.get",
    "java.util.HashMap.put",           "java.util.HashMap.get",           "java.lang.Object.<init>",
    "java.lang.Math.max",              "java.lang.System.currentTimeMillis", "java.util.Iterator.next",
    "java.util.Iterator.hasNext",      "android.util.Log.d",              "android.app.Activity.onCreate",
    "android.app.Activity.setContentView", "android.view.View.findViewById", "android.os.Handler.post",
    "android.content.Intent.<init>",   "android.os.Bundle.getString",     "java.lang.Thread.start",
    "java.util.List.size",             "java.lang.String.equals",         "java.lang.Character.isDigit",
};

std::size_t overlap(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t n = 0;
    for (auto x : a) n += std::binary_search(b.begin(), b.end(), x);
    return n;
}

}  // namespace

std::uint64_t SynthConfig::digest() const {
    Digest d;
    d.u64(families).u64(variants).u64(seed).f64(noise_rate).u64(signature_size).u64(overlap_budget);
    d.u64(scaffold_lo).u64(scaffold_hi).f64(other_api_ratio);
    return d.value();
}

std::vector<FamilySpec> gen_family_specs(const SynthConfig& cfg, const ApiRegistry& registry) {
    if (cfg.families < 2) throw UsageError("synth needs at least 2 families");
    if (cfg.variants < 1) throw UsageError("synth needs at least 1 variant per family");
    if (cfg.signature_size == 0) throw UsageError("signature size must be positive");
    if (cfg.scaffold_lo < 2 || cfg.scaffold_hi < cfg.scaffold_lo) throw UsageError("bad scaffold size bounds");

    // Crypto/reflection rows are left to the encryption simulator.
    std::vector<std::uint32_t> pool;
    auto crypto = registry.crypto_indices();
    for (std::uint32_t i = 0; i < registry.size(); ++i)
        if (!std::binary_search(crypto.begin(), crypto.end(), i)) pool.push_back(i);
    if (pool.size() < cfg.signature_size)
        throw UsageError("registry has " + std::to_string(pool.size()) + " usable APIs, fewer than the signature size");

    Rng rng(mix_seed(cfg.seed, 0xfa111e5));
    std::vector<FamilySpec> specs;
    constexpr int kAttempts = 20000;
    for (std::uint32_t f = 0; f < cfg.families; ++f) {
        FamilySpec spec;
        bool placed = false;
        for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
            auto draw = pool;
            shuffle(draw, rng);
            draw.resize(cfg.signature_size);
            std::sort(draw.begin(), draw.end());
            placed = std::all_of(specs.begin(), specs.end(), [&](const FamilySpec& s) {
                return overlap(s.signature_apis, draw) <= cfg.overlap_budget;
            });
            if (placed) spec.signature_apis = std::move(draw);
        }
        if (!placed)
            throw UsageError("registry too small for " + std::to_string(cfg.families) + " families of " +
                             std::to_string(cfg.signature_size) + " signature APIs with overlap budget " +
                             std::to_string(cfg.overlap_budget));
        spec.id = f;
        spec.name = "family" + std::to_string(f);
        const auto span = cfg.scaffold_hi - cfg.scaffold_lo;
        spec.scaffold_min = cfg.scaffold_lo + uniform_index(rng, span / 2 + 1);
        spec.scaffold_max = spec.scaffold_min + span / 4 + uniform_index(rng, span / 4 + 1);
        spec.scaffold_max = std::max(spec.scaffold_max, spec.scaffold_min);
        spec.edges_per_node = 1 + uniform_index(rng, 3);
        spec.depth_min = 1 + uniform_index(rng, 4);
        spec.depth_max = spec.depth_min + uniform_index(rng, 3);
        spec.callers_min = 1 + uniform_index(rng, 2);
        spec.callers_max = spec.callers_min + uniform_index(rng, 3);
        spec.overlap_budget = cfg.overlap_budget;
        specs.push_back(std::move(spec));
    }
    return specs;
}

CallGraph gen_variant(const FamilySpec& spec, const ApiRegistry& registry, const SynthConfig& cfg, Rng& rng) {
    GraphBuilder b(registry);
    const auto n = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(spec.scaffold_min),
                                                        static_cast<std::int64_t>(spec.scaffold_max)));

    // Scaffold: node k picks up to edges_per_node callers among 0..k-1 with
    // probability proportional to (out-degree + 1). Edges go caller -> callee,
    // so depth from the entry point 0 is min over callers + 1.
    std::vector<std::uint32_t> users(n);
    std::vector<std::size_t> depth(n, 0), weight(n, 1);
    std::size_t weight_total = 0;
    for (std::size_t k = 0; k < n; ++k) {
        users[k] = b.add_user("fn" + std::to_string(k));
        if (k > 0) {
            const std::size_t fan = std::min(spec.edges_per_node, k);
            depth[k] = std::numeric_limits<std::size_t>::max();
            for (std::size_t e = 0; e < fan; ++e) {
                std::uint64_t r = uniform_index(rng, weight_total);
                std::size_t c = 0;
                while (r >= weight[c]) r -= weight[c++];
                b.add_edge(users[c], users[k]);
                depth[k] = std::min(depth[k], depth[c] + 1);
                ++weight[c];
                ++weight_total;
            }
        }
        weight_total += weight[k];
    }

    auto callers_at_depth = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::uint32_t> out;
        for (std::size_t k = 0; k < n; ++k)
            if (depth[k] >= lo && depth[k] <= hi) out.push_back(static_cast<std::uint32_t>(k));
        if (out.empty()) {
            // Shallow scaffold: fall back to the deepest nodes available.
            const auto deepest = *std::max_element(depth.begin(), depth.end());
            for (std::size_t k = 0; k < n; ++k)
                if (depth[k] == deepest) out.push_back(static_cast<std::uint32_t>(k));
        }
        return out;
    };

    auto wire_api = [&](std::uint32_t api, std::size_t callers, const std::vector<std::uint32_t>& candidates) {
        const auto node = b.add_api(registry.at(api), registry.at(api));
        for (std::size_t c = 0; c < callers; ++c) b.add_edge(users[candidates[uniform_index(rng, candidates.size())]], node);
    };

    const auto sig_callers = callers_at_depth(spec.depth_min, spec.depth_max);
    for (auto api : spec.signature_apis) {
        const auto callers = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(spec.callers_min),
                                                                  static_cast<std::int64_t>(spec.callers_max)));
        wire_api(api, callers, sig_callers);
    }

    const auto crypto = registry.crypto_indices();
    const auto anywhere = callers_at_depth(0, std::numeric_limits<std::size_t>::max());
    for (std::uint32_t api = 0; api < registry.size(); ++api) {
        if (std::binary_search(spec.signature_apis.begin(), spec.signature_apis.end(), api)) continue;
        if (std::binary_search(crypto.begin(), crypto.end(), api)) continue;
        if (uniform01(rng) < cfg.noise_rate) wire_api(api, 1, anywhere);
    }

    const auto libs = static_cast<std::size_t>(cfg.other_api_ratio * static_cast<double>(n));
    for (std::size_t k = 0; k < libs && k < kLibraryApis.size(); ++k) {
        const auto node = b.add_api(kLibraryApis[k], kLibraryApis[k]);
        const auto callers = 1 + uniform_index(rng, 3);
        for (std::size_t c = 0; c < callers; ++c) b.add_edge(users[uniform_index(rng, n)], node);
    }
    return std::move(b).build();
}

std::uint64_t variant_seed(std::uint64_t master, std::uint32_t family, std::size_t index) {
    return mix_seed(mix_seed(master, family), index);
}

SynthGraphs gen_graphs(const SynthConfig& cfg, const ApiRegistry& registry, std::size_t jobs) {
    const auto specs = gen_family_specs(cfg, registry);
    SynthGraphs out;
    for (const auto& s : specs) out.families.push_back(s.name);
    const std::size_t total = cfg.families * cfg.variants;
    out.graphs.resize(total);
    out.labels.resize(total);
    out.seeds.resize(total);
    parallel_for(total, jobs, [&](std::size_t i) {
        const auto f = static_cast<std::uint32_t>(i / cfg.variants);
        const auto seed = variant_seed(cfg.seed, f, i % cfg.variants);
        Rng rng(seed);
        out.graphs[i] = gen_variant(specs[f], registry, cfg, rng);
        out.labels[i] = f;
        out.seeds[i] = seed;
    });
    return out;
}

LabeledDataset featurize_all(SynthGraphs graphs, const ApiRegistry& registry, std::size_t jobs) {
    LabeledDataset ds;
    ds.registry_hash = registry.content_hash();
    ds.families = std::move(graphs.families);
    ds.samples.resize(graphs.graphs.size());
    std::vector<std::size_t> index_in_family(graphs.graphs.size());
    std::vector<std::size_t> seen(ds.families.size(), 0);
    for (std::size_t i = 0; i < graphs.labels.size(); ++i) index_in_family[i] = seen[graphs.labels[i]]++;
    parallel_for(graphs.graphs.size(), jobs, [&](std::size_t i) {
        auto& s = ds.samples[i];
        s.image = featurize(graphs.graphs[i], registry);
        s.label = graphs.labels[i];
        s.seed = graphs.seeds[i];
        s.name = ds.families[s.label] + "_" + std::to_string(index_in_family[i]);
    });
    ds.graphs = std::move(graphs.graphs);
    return ds;
}

LabeledDataset gen_dataset(const SynthConfig& cfg, const ApiRegistry& registry, std::size_t jobs) {
    return featurize_all(gen_graphs(cfg, registry, jobs), registry, jobs);
}

std::string dataset_manifest(const SynthConfig& cfg, const std::vector<FamilySpec>& specs, const LabeledDataset& ds,
                             const std::vector<std::string>& graph_paths,
                             const std::vector<std::string>& image_paths) {
    using nlohmann::json;
    json j;
    j["config"] = {{"families", cfg.families},     {"variants", cfg.variants},
                   {"seed", cfg.seed},             {"noise_rate", cfg.noise_rate},
                   {"signature_size", cfg.signature_size}, {"overlap_budget", cfg.overlap_budget},
                   {"scaffold_lo", cfg.scaffold_lo}, {"scaffold_hi", cfg.scaffold_hi},
                   {"other_api_ratio", cfg.other_api_ratio}, {"digest", hex64(cfg.digest())}};
    j["registry_hash"] = hex64(ds.registry_hash);
    j["dataset_digest"] = hex64(ds.digest());
    json fams = json::array();
    for (const auto& s : specs)
        fams.push_back({{"id", s.id},
                        {"name", s.name},
                        {"signature_apis", s.signature_apis},
                        {"scaffold", {s.scaffold_min, s.scaffold_max}},
                        {"edges_per_node", s.edges_per_node},
                        {"depth", {s.depth_min, s.depth_max}},
                        {"callers", {s.callers_min, s.callers_max}}});
    j["families"] = fams;
    json items = json::array();
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const auto& s = ds.samples[i];
        json it = {{"name", s.name}, {"label", s.label}, {"family", ds.families.at(s.label)},
                   {"seed", s.seed}, {"image_digest", hex64(s.image.digest())}};
        if (i < graph_paths.size()) it["graph"] = graph_paths[i];
        if (i < image_paths.size()) it["image"] = image_paths[i];
        items.push_back(std::move(it));
    }
    j["items"] = items;
    return j.dump(1);
}

}  // namespace cgfam

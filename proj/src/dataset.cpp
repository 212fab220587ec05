#include "cgfam/dataset.hpp"

#include "cgfam/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>

namespace cgfam {

std::vector<std::uint32_t> LabeledDataset::labels() const {
    std::vector<std::uint32_t> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.label);
    return out;
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
    LabeledDataset out;
    out.families = families;
    out.registry_hash = registry_hash;
    for (auto i : indices) {
        out.samples.push_back(samples.at(i));
        if (has_graphs()) out.graphs.push_back(graphs.at(i));
    }
    return out;
}

std::uint64_t LabeledDataset::digest() const {
    Digest d;
    d.u64(registry_hash).u64(families.size());
    for (const auto& f : families) d.str(f);
    d.u64(samples.size());
    for (const auto& s : samples) d.u64(s.label).u64(s.image.digest());
    return d.value();
}

void validate(const LabeledDataset& ds) {
    if (ds.families.empty()) throw FormatError("dataset has no families");
    if (ds.has_graphs() && ds.graphs.size() != ds.samples.size())
        throw FormatError("dataset graph list does not match its samples");
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const auto& s = ds.samples[i];
        if (s.label >= ds.families.size())
            throw FormatError("sample " + std::to_string(i) + " has label " + std::to_string(s.label) + " but only " +
                              std::to_string(ds.families.size()) + " families exist");
        if (s.image.registry_hash != ds.registry_hash)
            throw HashMismatchError("sample " + std::to_string(i) + " was featurized against another registry");
        if (s.image.layout != ds.samples.front().image.layout)
            throw FormatError("sample " + std::to_string(i) + " has a different image layout");
    }
}

LabeledDataset load_dataset(const std::string& manifest_path, const ApiRegistry& registry, bool keep_graphs,
                            std::size_t jobs) {
    namespace fs = std::filesystem;
    using nlohmann::json;
    json j;
    try {
        j = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw FormatError(manifest_path + ": " + e.what());
    }
    const fs::path base = fs::path(manifest_path).parent_path();
    if (!j.contains("families") || !j["families"].is_array() || !j.contains("items") || !j["items"].is_array())
        throw FormatError(manifest_path + ": manifest needs 'families' and 'items' arrays");

    LabeledDataset ds;
    ds.registry_hash = registry.content_hash();
    for (const auto& f : j["families"]) {
        if (f.is_string())
            ds.families.push_back(f.get<std::string>());
        else if (f.is_object() && f.contains("name") && f["name"].is_string())
            ds.families.push_back(f["name"].get<std::string>());
        else
            throw FormatError(manifest_path + ": family entries must be names or objects with 'name'");
    }

    const auto& items = j["items"];
    const std::size_t n = items.size();
    ds.samples.resize(n);
    std::vector<std::string> graph_paths(n), image_paths(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& it = items[i];
        auto& s = ds.samples[i];
        const std::string where = manifest_path + ": item " + std::to_string(i);
        if (!it.is_object()) throw FormatError(where + " is not an object");
        if (it.contains("family")) {
            const auto name = it["family"].get<std::string>();
            auto pos = std::find(ds.families.begin(), ds.families.end(), name);
            if (pos == ds.families.end()) throw FormatError(where + " names unknown family '" + name + "'");
            s.label = static_cast<std::uint32_t>(pos - ds.families.begin());
        } else if (it.contains("label")) {
            s.label = it["label"].get<std::uint32_t>();
        } else {
            throw FormatError(where + " has neither 'family' nor 'label'");
        }
        s.name = it.value("name", "item" + std::to_string(i));
        s.seed = it.value("seed", std::uint64_t{0});
        if (it.contains("graph")) graph_paths[i] = (base / it["graph"].get<std::string>()).string();
        if (it.contains("image")) image_paths[i] = (base / it["image"].get<std::string>()).string();
        if (graph_paths[i].empty() && image_paths[i].empty()) throw FormatError(where + " has neither graph nor image");
    }

    const bool graphs_wanted =
        keep_graphs && std::all_of(graph_paths.begin(), graph_paths.end(), [](const auto& p) { return !p.empty(); });
    if (graphs_wanted) ds.graphs.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        auto& s = ds.samples[i];
        std::optional<CallGraph> g;
        if (!graph_paths[i].empty() && (graphs_wanted || image_paths[i].empty()))
            g = load_graph(read_file(graph_paths[i]), registry);
        if (!image_paths[i].empty()) {
            s.image = decode_image(read_file(image_paths[i]));
            if (s.image.registry_hash != registry.content_hash())
                throw HashMismatchError(image_paths[i] + " was featurized with registry " +
                                        hex64(s.image.registry_hash) + ", expected " +
                                        hex64(registry.content_hash()));
        } else {
            s.image = featurize(*g, registry);
        }
        if (graphs_wanted) ds.graphs[i] = std::move(*g);
    });
    validate(ds);
    return ds;
}

}  // namespace cgfam

#include "cgfam/report.hpp"

#include "cgfam/common.hpp"

#include <json.hpp>

#include <numeric>

namespace cgfam {

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::static_analysis: return "Static Analysis";
        case Stage::image_generation: return "Image Generation";
        case Stage::familial_classification: return "Familial Classification";
        case Stage::interpretation: return "Interpretation";
    }
    return "?";
}

double RunReport::total() const { return std::accumulate(seconds.begin(), seconds.end(), 0.0); }

std::string RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config_digest"] = hex64(config_digest);
    j["seed"] = seed;
    auto stages = nlohmann::ordered_json::object();
    for (auto s : kStages) stages[std::string(stage_name(s))] = seconds[static_cast<std::size_t>(s)];
    j["stages"] = stages;
    j["total"] = total();
    j["outputs"] = outputs;
    return j.dump(1);
}

}  // namespace cgfam

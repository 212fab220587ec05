#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cgfam {

enum class Stage { static_analysis, image_generation, familial_classification, interpretation };

inline constexpr std::array<Stage, 4> kStages = {Stage::static_analysis, Stage::image_generation,
                                                 Stage::familial_classification, Stage::interpretation};

std::string_view stage_name(Stage s);

struct RunReport {
    std::string command;
    std::uint64_t config_digest = 0;
    std::uint64_t seed = 0;
    std::array<double, 4> seconds{};  // indexed by Stage
    std::vector<std::string> outputs;

    void add(Stage s, double secs) { seconds[static_cast<std::size_t>(s)] += secs; }
    double total() const;
    std::string to_json() const;
};

/// Adds the elapsed wall-clock time to a stage when it goes out of scope.
class StageTimer {
public:
    StageTimer(RunReport& r, Stage s) : report_(r), stage_(s), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        report_.add(stage_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    }
    StageTimer(const StageTimer&) = delete;
    StageTimer& operator=(const StageTimer&) = delete;

private:
    RunReport& report_;
    Stage stage_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace cgfam

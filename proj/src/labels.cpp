#include "adl/labels.hpp"

#include <algorithm>
#include <span>

namespace adl {

namespace {

std::span<const std::string_view> names_of(Stage stage) {
    switch (stage) {
        case Stage::Adl: return kAdlNames;
        case Stage::Env: return kEnvNames;
        case Stage::Standing: return kStandingNames;
    }
    return {};
}

}  // namespace

std::string_view stage_key(Stage stage) {
    switch (stage) {
        case Stage::Adl: return "adl";
        case Stage::Env: return "env";
        case Stage::Standing: return "standing";
    }
    return "";
}

std::optional<Stage> parse_stage(std::string_view key) {
    for (Stage s : {Stage::Adl, Stage::Env, Stage::Standing}) {
        if (stage_key(s) == key) return s;
    }
    return std::nullopt;
}

std::size_t class_count(Stage stage) { return names_of(stage).size(); }

std::string_view class_name(Stage stage, std::size_t index) { return names_of(stage)[index]; }

std::optional<std::size_t> class_index(Stage stage, std::string_view name) {
    auto names = names_of(stage);
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

}  // namespace adl

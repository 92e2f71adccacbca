#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace adl {

/// Recognition stages, in pipeline order.
enum class Stage { Adl, Env, Standing };

enum class AdlLabel { Walking, Running, Standing, GoingUpstairs, GoingDownstairs };

enum class EnvLabel {
    Bar,
    Classroom,
    Gym,
    Kitchen,
    Library,
    Street,
    Hall,
    WatchingTvRoom,
    Bedroom,
};

// "Watching TV" is both a room and a standing activity; the two live in separate enums.
enum class StandingLabel { WatchingTv, Sleeping, Driving };

inline constexpr std::array<std::string_view, 5> kAdlNames{
    "walking", "running", "standing", "going_upstairs", "going_downstairs"};
inline constexpr std::array<std::string_view, 9> kEnvNames{
    "bar", "classroom", "gym", "kitchen", "library", "street", "hall", "watching_tv_room", "bedroom"};
inline constexpr std::array<std::string_view, 3> kStandingNames{"watching_tv", "sleeping", "driving"};

/// Label namespace used in window headers ("label.<ns>=...").
std::string_view stage_key(Stage stage);
std::optional<Stage> parse_stage(std::string_view key);

/// Number of classes a stage distinguishes: 5, 9 or 3.
std::size_t class_count(Stage stage);
std::string_view class_name(Stage stage, std::size_t index);
std::optional<std::size_t> class_index(Stage stage, std::string_view name);

}  // namespace adl

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adl/labels.hpp"

namespace adl {

struct Vec3Sample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    bool operator==(const Vec3Sample&) const = default;
};

struct GpsSample {
    double t = 0.0;
    double lat = 0.0;
    double lon = 0.0;
    bool operator==(const GpsSample&) const = default;
};

struct AudioStream {
    std::vector<double> samples;  // amplitudes in [-1, 1]
    double sample_rate = 8000.0;
    bool operator==(const AudioStream&) const = default;
};

using TriaxialStream = std::vector<Vec3Sample>;

enum class Sensor { Accel, Magnet, Gyro, Mic, Gps };

std::string_view sensor_name(Sensor sensor);

/// One acquisition burst. Absent sensors are empty optionals, never zero-filled.
struct SensorWindow {
    std::string window_id;
    std::optional<TriaxialStream> accel;
    std::optional<TriaxialStream> magnet;
    std::optional<TriaxialStream> gyro;
    std::optional<AudioStream> audio;
    std::optional<std::vector<GpsSample>> gps;
    double duration = 5.0;
    /// Ground truth keyed by stage namespace ("adl", "env", "standing").
    std::map<std::string, std::string> labels;

    bool operator==(const SensorWindow&) const = default;

    const std::optional<TriaxialStream>& motion(Sensor sensor) const;
    std::optional<std::string> label(Stage stage) const;
};

struct SensorAvailability {
    bool accel = false;
    bool magnet = false;
    bool gyro = false;
    bool mic = false;
    bool gps = false;

    bool has(Sensor sensor) const;
    /// True when every sensor of `other` is also available here.
    bool covers(const SensorAvailability& other) const;
    bool operator==(const SensorAvailability&) const = default;

    static SensorAvailability all();
    static SensorAvailability of(const SensorWindow& window);
};

/// Throws ValidationError when an invariant of SensorWindow does not hold.
void validate_window(const SensorWindow& window);

/// Parses the comma-separated window format; the result is validated.
SensorWindow parse_window(std::string_view text);
/// Inverse of parse_window; doubles are written in shortest round-trip form.
std::string serialize_window(const SensorWindow& window);

SensorWindow read_window_file(const std::filesystem::path& path);
void write_window_file(const std::filesystem::path& path, const SensorWindow& window);

/// Writes one file per window plus manifest.csv (file name and labels per row).
void write_dataset(const std::filesystem::path& dir, const std::vector<SensorWindow>& windows);
std::vector<SensorWindow> read_dataset(const std::filesystem::path& dir);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);

}  // namespace adl

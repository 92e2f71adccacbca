#include "adl/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "adl/error.hpp"

namespace adl {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double number_at(std::size_t line, std::string_view field, std::string_view what) {
    auto value = parse_double(trim(field));
    if (!value) {
        throw ParseError(line, "expected a finite number for " + std::string(what) + ", got '" +
                                   std::string(field) + "'");
    }
    return *value;
}

template <typename Samples>
void check_increasing(const Samples& samples, std::string_view stream) {
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].t > samples[i - 1].t)) {
            throw ValidationError(std::string(stream) + ": timestamps must be strictly increasing (sample " +
                                  std::to_string(i) + ")");
        }
    }
}

void parse_header(std::size_t line, std::string_view body, SensorWindow& window) {
    for (auto item : split(body, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError(line, "header entry without '=': " + std::string(item));
        auto key = trim(item.substr(0, eq));
        auto value = trim(item.substr(eq + 1));
        if (key == "window_id") {
            window.window_id = std::string(value);
        } else if (key == "duration") {
            window.duration = number_at(line, value, "duration");
        } else if (key == "audio_rate") {
            if (!window.audio) window.audio.emplace();
            window.audio->sample_rate = number_at(line, value, "audio_rate");
        } else if (key.starts_with("label.") && key.size() > 6) {
            window.labels[std::string(key.substr(6))] = std::string(value);
        } else {
            throw ParseError(line, "unknown header key '" + std::string(key) + "'");
        }
    }
}

void write_triaxial(std::ostringstream& out, std::string_view name, const std::optional<TriaxialStream>& stream) {
    if (!stream) return;
    for (const auto& s : *stream) {
        out << name << ',' << format_double(s.t) << ',' << format_double(s.x) << ',' << format_double(s.y)
            << ',' << format_double(s.z) << '\n';
    }
}

}  // namespace

std::string_view sensor_name(Sensor sensor) {
    switch (sensor) {
        case Sensor::Accel: return "accel";
        case Sensor::Magnet: return "magnet";
        case Sensor::Gyro: return "gyro";
        case Sensor::Mic: return "mic";
        case Sensor::Gps: return "gps";
    }
    return "";
}

const std::optional<TriaxialStream>& SensorWindow::motion(Sensor sensor) const {
    switch (sensor) {
        case Sensor::Accel: return accel;
        case Sensor::Magnet: return magnet;
        case Sensor::Gyro: return gyro;
        default: break;
    }
    throw DomainError("not a motion sensor: " + std::string(sensor_name(sensor)));
}

std::optional<std::string> SensorWindow::label(Stage stage) const {
    auto it = labels.find(std::string(stage_key(stage)));
    if (it == labels.end()) return std::nullopt;
    return it->second;
}

bool SensorAvailability::has(Sensor sensor) const {
    switch (sensor) {
        case Sensor::Accel: return accel;
        case Sensor::Magnet: return magnet;
        case Sensor::Gyro: return gyro;
        case Sensor::Mic: return mic;
        case Sensor::Gps: return gps;
    }
    return false;
}

bool SensorAvailability::covers(const SensorAvailability& other) const {
    return (accel || !other.accel) && (magnet || !other.magnet) && (gyro || !other.gyro) &&
           (mic || !other.mic) && (gps || !other.gps);
}

SensorAvailability SensorAvailability::all() { return {true, true, true, true, true}; }

SensorAvailability SensorAvailability::of(const SensorWindow& w) {
    return {w.accel.has_value(), w.magnet.has_value(), w.gyro.has_value(), w.audio.has_value(),
            w.gps.has_value()};
}

void validate_window(const SensorWindow& w) {
    if (!w.accel && !w.magnet && !w.gyro && !w.audio && !w.gps) {
        throw ValidationError("window '" + w.window_id + "' has no sensor stream");
    }
    for (Sensor s : {Sensor::Accel, Sensor::Magnet, Sensor::Gyro}) {
        const auto& stream = w.motion(s);
        if (!stream) continue;
        if (stream->empty()) throw ValidationError(std::string(sensor_name(s)) + ": stream is empty");
        check_increasing(*stream, sensor_name(s));
    }
    if (w.audio) {
        if (!(w.audio->sample_rate > 0.0) || !std::isfinite(w.audio->sample_rate)) {
            throw ValidationError("audio: sample rate must be positive");
        }
        if (w.audio->samples.empty()) throw ValidationError("audio: stream is empty");
    }
    if (w.gps) {
        if (w.gps->empty()) throw ValidationError("gps: stream is empty");
        check_increasing(*w.gps, "gps");
        for (std::size_t i = 0; i < w.gps->size(); ++i) {
            const auto& p = (*w.gps)[i];
            if (p.lat < -90.0 || p.lat > 90.0) {
                throw ValidationError("gps: latitude out of range at sample " + std::to_string(i));
            }
            if (p.lon < -180.0 || p.lon > 180.0) {
                throw ValidationError("gps: longitude out of range at sample " + std::to_string(i));
            }
        }
    }
}

SensorWindow parse_window(std::string_view text) {
    SensorWindow w;
    std::vector<double> audio_t;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            parse_header(line_no, line.substr(1), w);
            continue;
        }
        auto fields = split(line, ',');
        auto stream = trim(fields[0]);
        auto expect = [&](std::size_t n) {
            if (fields.size() != n) {
                throw ParseError(line_no, std::string(stream) + " row needs " + std::to_string(n) +
                                              " fields, got " + std::to_string(fields.size()));
            }
        };
        if (stream == "accel" || stream == "magnet" || stream == "gyro") {
            expect(5);
            Vec3Sample s{number_at(line_no, fields[1], "t"), number_at(line_no, fields[2], "x"),
                         number_at(line_no, fields[3], "y"), number_at(line_no, fields[4], "z")};
            auto& target = stream == "accel" ? w.accel : stream == "magnet" ? w.magnet : w.gyro;
            if (!target) target.emplace();
            target->push_back(s);
        } else if (stream == "audio") {
            expect(3);
            audio_t.push_back(number_at(line_no, fields[1], "t"));
            if (!w.audio) w.audio.emplace();
            w.audio->samples.push_back(number_at(line_no, fields[2], "amplitude"));
        } else if (stream == "gps") {
            expect(4);
            GpsSample s{number_at(line_no, fields[1], "t"), number_at(line_no, fields[2], "lat"),
                        number_at(line_no, fields[3], "lon")};
            if (!w.gps) w.gps.emplace();
            w.gps->push_back(s);
        } else {
            throw ParseError(line_no, "unknown stream '" + std::string(stream) + "'");
        }
    }
    // audio_rate alone in the header does not make the stream present.
    if (w.audio && w.audio->samples.empty()) w.audio.reset();
    for (std::size_t i = 1; i < audio_t.size(); ++i) {
        if (!(audio_t[i] > audio_t[i - 1])) {
            throw ValidationError("audio: timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
        }
    }
    validate_window(w);
    return w;
}

std::string serialize_window(const SensorWindow& w) {
    std::ostringstream out;
    out << "# window_id=" << w.window_id << ",duration=" << format_double(w.duration);
    if (w.audio) out << ",audio_rate=" << format_double(w.audio->sample_rate);
    for (const auto& [ns, value] : w.labels) out << ",label." << ns << '=' << value;
    out << '\n';
    write_triaxial(out, "accel", w.accel);
    write_triaxial(out, "magnet", w.magnet);
    write_triaxial(out, "gyro", w.gyro);
    if (w.audio) {
        const double rate = w.audio->sample_rate;
        for (std::size_t i = 0; i < w.audio->samples.size(); ++i) {
            out << "audio," << format_double(static_cast<double>(i) / rate) << ','
                << format_double(w.audio->samples[i]) << '\n';
        }
    }
    if (w.gps) {
        for (const auto& p : *w.gps) {
            out << "gps," << format_double(p.t) << ',' << format_double(p.lat) << ',' << format_double(p.lon)
                << '\n';
        }
    }
    return out.str();
}

SensorWindow read_window_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open window file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_window(buf.str());
}

void write_window_file(const std::filesystem::path& path, const SensorWindow& window) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write window file " + path.string());
    out << serialize_window(window);
}

void write_dataset(const std::filesystem::path& dir, const std::vector<SensorWindow>& windows) {
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / "manifest.csv", std::ios::binary);
    if (!manifest) throw Error("cannot write manifest in " + dir.string());
    manifest << "file,labels\n";
    for (const auto& w : windows) {
        const std::string file = w.window_id + ".csv";
        write_window_file(dir / file, w);
        manifest << file << ',';
        bool first = true;
        for (const auto& [ns, value] : w.labels) {
            manifest << (first ? "" : ";") << ns << '=' << value;
            first = false;
        }
        manifest << '\n';
    }
}

std::vector<SensorWindow> read_dataset(const std::filesystem::path& dir) {
    std::ifstream manifest(dir / "manifest.csv", std::ios::binary);
    if (!manifest) throw Error("no manifest.csv in " + dir.string());
    std::vector<SensorWindow> windows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(manifest, line)) {
        ++line_no;
        auto row = trim(line);
        if (row.empty() || (line_no == 1 && row == "file,labels")) continue;
        auto comma = row.find(',');
        if (comma == std::string_view::npos) throw ParseError(line_no, "manifest row needs 'file,labels'");
        auto window = read_window_file(dir / std::string(trim(row.substr(0, comma))));
        std::map<std::string, std::string> labels;
        for (auto item : split(row.substr(comma + 1), ';')) {
            item = trim(item);
            if (item.empty()) continue;
            auto eq = item.find('=');
            if (eq == std::string_view::npos) throw ParseError(line_no, "manifest label without '='");
            labels[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
        }
        if (labels != window.labels) {
            throw ValidationError("manifest labels disagree with window file for '" + window.window_id + "'");
        }
        windows.push_back(std::move(window));
    }
    return windows;
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view text) {
    double value = 0.0;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace adl

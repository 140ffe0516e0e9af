#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "petzlab/version.hpp"

namespace petzlab {

using Json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Floats are serialized with 17 significant digits ('.' decimal, C locale)
/// so reruns reproduce outputs byte for byte.
inline std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        for (size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
        columns_ = header.size();
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
        for (size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

    void row(std::initializer_list<double> values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_float(v));
        row(cells);
    }

  private:
    std::ofstream out_;
    size_t columns_ = 0;
};

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

/// Parses JSON with a line/column-precise diagnostic on failure.
inline Json parse_json_file(const std::filesystem::path& path) {
    const std::string body = read_file(path);
    try {
        return Json::parse(body);
    } catch (const Json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < body.size(); ++i) {
            if (body[i] == '\n') { ++line; col = 1; }
            else ++col;
        }
        throw ConfigError(path.string() + ":" + std::to_string(line) + ":" +
                          std::to_string(col) + ": " + e.what());
    }
}

/// Records every artifact a run produced; the content hashes back the
/// determinism guarantee (same config + seed => same hashes).
class Manifest {
  public:
    Manifest(std::string experiment, const std::filesystem::path& out_dir,
             const std::string& config_body, std::uint64_t seed)
        : experiment_(std::move(experiment)),
          out_dir_(out_dir),
          config_hash_(hex64(fnv1a64(config_body))),
          seed_(seed) {}

    void add(const std::filesystem::path& path) { files_.push_back(path); }

    void write(double wall_time_s) const {
        Json j;
        j["experiment"] = experiment_;
        j["version"] = PETZLAB_VERSION;
        j["config_hash"] = config_hash_;
        j["seed"] = seed_;
        j["wall_time_s"] = wall_time_s;
        Json outputs = Json::array();
        for (const auto& f : files_) {
            Json entry;
            entry["path"] = f.filename().string();
            entry["fnv1a64"] = hex64(fnv1a64(read_file(f)));
            outputs.push_back(entry);
        }
        j["outputs"] = outputs;
        write_file(out_dir_ / "manifest.json", j.dump(2) + "\n");
    }

  private:
    std::string experiment_;
    std::filesystem::path out_dir_;
    std::string config_hash_;
    std::uint64_t seed_;
    std::vector<std::filesystem::path> files_;
};

}  // namespace petzlab

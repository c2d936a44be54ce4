#pragma once

// CSV/JSON helpers. Numbers are always written with 17 significant digits
// so a double survives the round trip bit for bit.

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace inflection::io {

std::string fmt17(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const Table& table);
// Throws IoError if unreadable, FormatError on a malformed body.
Table read_csv(const std::filesystem::path& path);

// Pretty-printed, keys sorted.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

// Creates the directory and checks that a file can be written into it.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace inflection::io

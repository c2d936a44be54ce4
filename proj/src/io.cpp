#include "inflection/io.hpp"

#include "inflection/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace inflection::io {

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

void write_csv(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t k = 0; k < table.header.size(); ++k) out << (k ? "," : "") << table.header[k];
    out << '\n';
    std::string line;
    for (const auto& row : table.rows) {
        line.clear();
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) line += ',';
            line += fmt17(row[k]);
        }
        line += '\n';
        out << line;
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(' ');
            t.header.push_back(b == std::string::npos ? "" : cell.substr(b));
        }
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto end = line.find(',', pos);
            if (end == std::string::npos) end = line.size();
            std::string_view cell(line.data() + pos, end - pos);
            while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
            double v = 0.0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || p != cell.data() + cell.size())
                throw FormatError(fmt::format("{}:{}: not a number '{}'", path.string(), lineno, cell));
            row.push_back(v);
            pos = end + 1;
        }
        if (row.size() != t.header.size())
            throw FormatError(fmt::format("{}:{}: expected {} columns, got {}", path.string(), lineno,
                                          t.header.size(), row.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void ensure_writable_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw IoError("directory not writable: " + dir.string());
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace inflection::io

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace combnoise::app {

using Cell = std::variant<std::string, double, long long>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// Writes tables as <name>.csv or <name>.json into one directory, atomically,
// and remembers what it wrote for the manifest.
class OutputSink {
public:
    OutputSink(std::filesystem::path dir, std::string format);

    void write_table(const std::string& name, const Table& table);
    void write_json(const std::string& file, const nlohmann::json& j);
    const std::vector<std::string>& written() const { return written_; }

private:
    std::filesystem::path dir_;
    std::string format_;
    std::vector<std::string> written_;
};

std::string table_csv(const Table& table);
nlohmann::json table_json(const Table& table);

} // namespace combnoise::app

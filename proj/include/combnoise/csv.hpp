#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace combnoise::io {

// Scientific notation with 16 significant digits, "." decimal separator.
std::string format_number(double value);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace combnoise::io

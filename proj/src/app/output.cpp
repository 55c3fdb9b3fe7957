#include "combnoise/app/output.hpp"

#include "combnoise/csv.hpp"
#include "combnoise/errors.hpp"

namespace combnoise::app {

namespace {

std::string cell_text(const Cell& c)
{
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* d = std::get_if<double>(&c)) return io::format_number(*d);
    return std::to_string(std::get<long long>(c));
}

nlohmann::json cell_json(const Cell& c)
{
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return std::get<long long>(c);
}

} // namespace

std::string table_csv(const Table& table)
{
    io::CsvTable csv(table.columns);
    for (const auto& row : table.rows) {
        std::vector<std::string> cells;
        for (const auto& c : row) cells.push_back(cell_text(c));
        csv.add_row(std::move(cells));
    }
    return csv.str();
}

nlohmann::json table_json(const Table& table)
{
    auto rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw ContractError("table_json: row width does not match columns");
        }
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(obj));
    }
    return nlohmann::json{{"columns", table.columns}, {"rows", rows}};
}

OutputSink::OutputSink(std::filesystem::path dir, std::string format) : dir_(std::move(dir)), format_(std::move(format))
{
    std::filesystem::create_directories(dir_);
}

void OutputSink::write_table(const std::string& name, const Table& table)
{
    if (format_ == "json") {
        write_json(name + ".json", table_json(table));
        return;
    }
    const auto file = name + ".csv";
    io::write_atomic(dir_ / file, table_csv(table));
    written_.push_back(file);
}

void OutputSink::write_json(const std::string& file, const nlohmann::json& j)
{
    io::write_atomic(dir_ / file, j.dump(2) + "\n");
    written_.push_back(file);
}

} // namespace combnoise::app

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qarrow {

inline constexpr std::string_view kSchemaLine = "# qarrow-schema 1";

/// Shortest round-trip decimal form of `v`; identical across runs.
[[nodiscard]] std::string format_number(double v);

/// In-memory CSV table, written in one piece once complete.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);
    [[nodiscard]] std::size_t row_count() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

    /// Schema comment, header line, then rows.
    [[nodiscard]] std::string render() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Throws IoError.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace qarrow

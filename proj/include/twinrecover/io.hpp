#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace twinrec {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by header name; throws std::invalid_argument when absent.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

/// Comma-separated, first line is the header, blank lines and `#` lines skipped.
/// Every row must have as many fields as the header.
CsvTable read_csv(std::istream& in, const std::string& source = "<input>");
CsvTable read_csv_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
std::string file_digest(const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace twinrec

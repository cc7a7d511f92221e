#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace motifcrf::csv {

/// One parsed CSV row plus its 1-based source line number.
struct Row {
    std::vector<std::string> fields;
    long line = 0;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;
    std::string path;
};

/// Reads a comma-delimited UTF-8 file with a header row. Lines starting
/// with '#' are provenance/comment lines and are skipped. Throws
/// MalformedRow when a data row's column count differs from the header.
Table read_file(const std::filesystem::path& path);

/// Field accessors with typed parse errors carrying file:line context.
double parse_double(const Table& t, const Row& r, std::size_t col);
long parse_long(const Table& t, const Row& r, std::size_t col);
bool parse_bool01(const Table& t, const Row& r, std::size_t col);

/// Column lookup by header name; throws MalformedRow(line 1) when absent.
std::size_t column(const Table& t, const std::string& name);

/// Splits a semicolon-separated integer list ("0;1;2").
std::vector<long> parse_id_list(const Table& t, const Row& r, std::size_t col);

/// Formats a double so that parsing the text recovers the exact value.
std::string format_double(double v);

/// FNV-1a 64-bit over a file's bytes, as a fixed-width hex string.
/// Used for artifact provenance chains.
std::string file_hash(const std::filesystem::path& path);

std::string join(const std::vector<std::string>& fields, char sep = ',');

}  // namespace motifcrf::csv

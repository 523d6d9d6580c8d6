#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mdq {

using CsvCell = std::variant<double, std::int64_t, std::string>;

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Streams rows to a file; nothing is buffered beyond the stream itself.
/// Throws std::runtime_error on I/O failure.
class CsvWriter {
public:
    /// comment, when given, is written first as a '#'-prefixed line.
    CsvWriter(const std::string& path, const std::vector<std::string>& header,
              const std::optional<std::string>& comment = std::nullopt);

    void row(const std::vector<CsvCell>& cells);
    std::size_t rows_written() const { return rows_; }
    void close();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string path_;
};

void emit_csv(const std::vector<std::vector<CsvCell>>& rows, const std::vector<std::string>& header,
              const std::string& path);

/// "# generated <UTC ISO-8601 time>".
std::string timestamp_comment();

}  // namespace mdq

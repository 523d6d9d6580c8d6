#include "mdq/csv.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <stdexcept>

namespace mdq {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string render(const CsvCell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    return quote(std::get<std::string>(cell));
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header,
                     const std::optional<std::string>& comment)
    : out_(path, std::ios::out | std::ios::trunc | std::ios::binary), columns_(header.size()), path_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    if (comment) out_ << "# " << *comment << '\n';
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out_ << ',';
        out_ << quote(header[k]);
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed: " + path);
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_) {
        throw std::invalid_argument("CsvWriter: row has " + std::to_string(cells.size()) +
                                    " cells, header has " + std::to_string(columns_));
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out_ << ',';
        out_ << render(cells[k]);
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed: " + path_);
    ++rows_;
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw std::runtime_error("close failed: " + path_);
}

void emit_csv(const std::vector<std::vector<CsvCell>>& rows, const std::vector<std::string>& header,
              const std::string& path) {
    CsvWriter w(path, header);
    for (const auto& r : rows) w.row(r);
    w.close();
}

std::string timestamp_comment() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[64];
    std::strftime(buf, sizeof(buf), "generated %Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace mdq

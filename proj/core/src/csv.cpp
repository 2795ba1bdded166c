#include "stablekernel/csv.hpp"

#include <charconv>
#include <cmath>

#include "stablekernel/errors.hpp"

namespace stablekernel {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path), columns_(header.size()) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
    row_mixed(header);
}

std::string CsvWriter::quote(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string q = "\"";
    for (char c : field) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> f;
    f.reserve(values.size());
    for (double v : values) f.push_back(format_double(v));
    row_mixed(f);
}

void CsvWriter::row_mixed(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw IoError("csv row width mismatch in '" + path_ + "'");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << quote(fields[i]);
    }
    out_ << '\n';
    if (!out_) throw IoError("write to '" + path_ + "' failed");
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw IoError("closing '" + path_ + "' failed");
}

}  // namespace stablekernel

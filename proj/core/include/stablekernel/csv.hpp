#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace stablekernel {

/// Shortest round-trip decimal form, independent of the C++ locale.
std::string format_double(double v);

/// RFC 4180 writer: comma separated, CRLF-free, fields quoted only when needed.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& fields);
    void close();

private:
    static std::string quote(std::string_view field);
    std::ofstream out_;
    std::string path_;
    std::size_t columns_;
};

}  // namespace stablekernel

#include <cstdint>
#include <cstring>
#include <fstream>

#include "stablekernel/csv.hpp"
#include "stablekernel/density.hpp"
#include "stablekernel/errors.hpp"

namespace stablekernel {

namespace {

constexpr char magic[4] = {'S', 'T', 'K', 'D'};
constexpr std::uint32_t format_version = 1;

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("truncated field file '" + path + "'");
    return v;
}

}  // namespace

void write_field_csv(const DensityField& field, const std::string& path) {
    const auto& g = field.grid;
    const bool slices = field.per_slice || (!field.values.empty() && field.values.front().cols() > 1);
    std::vector<std::string> header{"t"};
    if (g.dim == 1) header.push_back("x");
    else header.insert(header.end(), {"x1", "x2"});
    if (slices) header.push_back("y");
    header.push_back("value");
    CsvWriter csv(path, header);
    for (std::size_t ti = 0; ti < field.values.size(); ++ti) {
        const auto& m = field.values[ti];
        for (Eigen::Index s = 0; s < m.cols(); ++s)
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                const Point x = g.point(static_cast<std::size_t>(i));
                std::vector<double> row{g.time_nodes[ti], x[0]};
                if (g.dim == 2) row.push_back(x[1]);
                if (slices) row.push_back(field.base_points.at(s)[0]);
                row.push_back(m(i, s));
                csv.row(row);
            }
    }
    csv.close();
}

void write_field_binary(const DensityField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const auto& g = field.grid;
    out.write(magic, 4);
    put<std::uint32_t>(out, format_version);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_x));
    put<double>(out, g.extent);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(field.values.size()));
    for (std::size_t ti = 0; ti < field.values.size(); ++ti) {
        put<double>(out, g.time_nodes[ti]);
        const auto& m = field.values[ti];
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index s = 0; s < m.cols(); ++s) put<double>(out, m(i, s));
    }
    out.close();
    if (!out) throw IoError("write to '" + path + "' failed");
}

DensityField read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open '" + path + "'");
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    char m[4];
    in.read(m, 4);
    if (!in || std::memcmp(m, magic, 4) != 0) throw IoError("'" + path + "' is not a field file");
    const auto version = get<std::uint32_t>(in, path);
    if (version != format_version) throw IoError("unsupported field file version in '" + path + "'");
    DensityField f;
    f.grid.dim = static_cast<int>(get<std::uint32_t>(in, path));
    f.grid.n_x = static_cast<int>(get<std::uint32_t>(in, path));
    f.grid.extent = get<double>(in, path);
    const auto n_t = get<std::uint32_t>(in, path);
    const std::size_t header = 4 + 4 * 3 + 8 + 4;
    const std::size_t points = f.grid.points();
    if (n_t == 0 || points == 0) throw IoError("empty field file '" + path + "'");
    const std::size_t row_doubles = (size - header) / 8 / n_t;
    if (row_doubles < 1 + points || (row_doubles - 1) % points != 0 || header + 8 * n_t * row_doubles != size)
        throw IoError("field file '" + path + "' has an inconsistent size");
    const std::size_t slices = (row_doubles - 1) / points;
    for (std::uint32_t ti = 0; ti < n_t; ++ti) {
        f.grid.time_nodes.push_back(get<double>(in, path));
        Eigen::MatrixXd v(points, slices);
        for (std::size_t i = 0; i < points; ++i)
            for (std::size_t s = 0; s < slices; ++s) v(i, s) = get<double>(in, path);
        f.values.push_back(std::move(v));
    }
    f.per_slice = slices > 1;
    f.kind = f.per_slice ? FieldKind::p : FieldKind::frozen_density;
    return f;
}

}  // namespace stablekernel

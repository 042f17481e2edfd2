#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nmar/data.hpp"

namespace nmar {

/// Metadata not carried by the CSV file itself.
struct DatasetMeta {
    std::vector<std::size_t> z_coords{0};
    double bound = 1.0;
};

/// Header `x1,...,xd,y,delta`; y is an empty field when delta = 0.
void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::filesystem::path& path);

Dataset read_csv(std::istream& in, const DatasetMeta& meta);
Dataset read_csv(const std::filesystem::path& path, const DatasetMeta& meta);

/// Shortest text that round-trips a double (at most 17 significant digits).
std::string format_double(double v);
double parse_double(std::string_view field, std::size_t row);

std::vector<std::string_view> split_fields(std::string_view line);

}  // namespace nmar

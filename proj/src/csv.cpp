#include "nmar/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "nmar/errors.hpp"

namespace nmar {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t row) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || field.empty()) {
        throw ParseError("row " + std::to_string(row) + ": cannot parse number '" + std::string(field) + "'");
    }
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

void write_csv(const Dataset& data, std::ostream& out) {
    for (std::size_t k = 0; k < data.dim(); ++k) out << 'x' << (k + 1) << ',';
    out << "y,delta\n";
    for (const auto& o : data.observations()) {
        for (double v : o.x) out << format_double(v) << ',';
        if (o.y) out << format_double(*o.y);
        out << ',' << o.delta() << '\n';
    }
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open '" + path.string() + "' for writing");
    write_csv(data, f);
}

Dataset read_csv(std::istream& in, const DatasetMeta& meta) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("row 0: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_fields(line);
    if (header.size() < 3 || header[header.size() - 2] != "y" || header.back() != "delta") {
        throw ParseError("row 0: header must be x1,...,xd,y,delta");
    }
    const std::size_t d = header.size() - 2;
    for (std::size_t k = 0; k < d; ++k) {
        if (header[k] != "x" + std::to_string(k + 1)) throw ParseError("row 0: unexpected column '" + std::string(header[k]) + "'");
    }

    std::vector<Observation> obs;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != d + 2) {
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(d + 2) + " fields");
        }
        Observation o;
        o.x.resize(d);
        for (std::size_t k = 0; k < d; ++k) {
            o.x[k] = parse_double(fields[k], row);
            if (!std::isfinite(o.x[k])) throw ParseError("row " + std::to_string(row) + ": non-finite covariate");
        }
        const auto delta_field = fields[d + 1];
        if (delta_field != "0" && delta_field != "1") {
            throw ParseError("row " + std::to_string(row) + ": delta must be 0 or 1");
        }
        const bool observed = delta_field == "1";
        const auto y_field = fields[d];
        if (observed) {
            if (y_field.empty()) throw ParseError("row " + std::to_string(row) + ": delta=1 requires a response");
            const double y = parse_double(y_field, row);
            if (!(std::abs(y) <= meta.bound)) {
                throw ParseError("row " + std::to_string(row) + ": |y| exceeds bound L=" + format_double(meta.bound));
            }
            o.y = y;
        } else if (!y_field.empty()) {
            throw ParseError("row " + std::to_string(row) + ": delta=0 requires an empty response field");
        }
        obs.push_back(std::move(o));
    }
    try {
        return Dataset(d, meta.z_coords, meta.bound, std::move(obs));
    } catch (const ConfigError& e) {
        throw ParseError(e.what());
    }
}

Dataset read_csv(const std::filesystem::path& path, const DatasetMeta& meta) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open '" + path.string() + "'");
    return read_csv(f, meta);
}

}  // namespace nmar

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "nmar/csv.hpp"
#include "nmar/errors.hpp"
#include "nmar/harness.hpp"

namespace nmar {

namespace {

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_rate_plot(const ExperimentResult& result, const std::filesystem::path& path) {
    const double width = 640, height = 440, left = 70, right = 180, top = 30, bottom = 60;
    double lx0 = std::numeric_limits<double>::infinity(), lx1 = -lx0, ly0 = lx0, ly1 = -lx0;
    for (const auto& a : result.aggregates) {
        if (a.count == 0 || !(a.median > 0.0)) continue;
        lx0 = std::min(lx0, std::log10(static_cast<double>(a.n)));
        lx1 = std::max(lx1, std::log10(static_cast<double>(a.n)));
        ly0 = std::min(ly0, std::log10(a.median));
        ly1 = std::max(ly1, std::log10(a.median));
    }
    if (!std::isfinite(lx0)) {
        lx0 = 2, lx1 = 4, ly0 = -3, ly1 = 0;
    }
    lx0 = std::floor(lx0 * 4) / 4 - 0.1;
    lx1 = std::ceil(lx1 * 4) / 4 + 0.1;
    ly0 = std::floor(ly0) - 0.05;
    ly1 = std::ceil(ly1) + 0.05;
    if (ly1 - ly0 < 1) ly1 = ly0 + 1;
    auto px = [&](double lx) { return left + (lx - lx0) / (lx1 - lx0) * (width - left - right); };
    auto py = [&](double ly) { return top + (ly1 - ly) / (ly1 - ly0) * (height - top - bottom); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
        << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
        out << "<text x=\"" << left - 8 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
        out << "<line x1=\"" << left << "\" x2=\"" << width - right << "\" y1=\"" << py(e) << "\" y2=\"" << py(e)
            << "\" stroke=\"#ddd\"/>\n";
    }
    std::vector<std::size_t> ns;
    for (const auto& a : result.aggregates) {
        if (std::find(ns.begin(), ns.end(), a.n) == ns.end()) ns.push_back(a.n);
    }
    for (auto n : ns) {
        const double x = px(std::log10(static_cast<double>(n)));
        out << "<text x=\"" << x << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">" << n
            << "</text>\n";
    }
    out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\">n</text>\n";
    out << "<text x=\"18\" y=\"" << (top + height - bottom) / 2 << "\" transform=\"rotate(-90 18 "
        << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">median error</text>\n";

    std::vector<std::string> names;
    for (const auto& a : result.aggregates) {
        if (std::find(names.begin(), names.end(), a.estimator) == names.end()) names.push_back(a.estimator);
    }
    for (std::size_t s = 0; s < names.size(); ++s) {
        const char* color = kColors[s % std::size(kColors)];
        for (const auto& a : result.aggregates) {
            if (a.estimator != names[s] || a.count == 0 || !(a.median > 0.0)) continue;
            out << "<circle cx=\"" << px(std::log10(static_cast<double>(a.n))) << "\" cy=\"" << py(std::log10(a.median))
                << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        }
        std::string label = names[s];
        for (const auto& r : result.rates) {
            if (r.estimator != names[s]) continue;
            // log10 e = slope log10 n + intercept / ln 10
            const double b = r.fit.intercept / std::log(10.0);
            out << "<line x1=\"" << px(lx0) << "\" y1=\"" << py(r.fit.slope * lx0 + b) << "\" x2=\"" << px(lx1)
                << "\" y2=\"" << py(r.fit.slope * lx1 + b) << "\" stroke=\"" << color
                << "\" stroke-dasharray=\"5,3\"/>\n";
            label += " (slope " + format_double(std::round(r.fit.slope * 1000) / 1000) + ")";
        }
        const double ly = top + 16 + 18 * static_cast<double>(s);
        out << "<rect x=\"" << width - right + 10 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
            << color << "\"/>\n";
        out << "<text x=\"" << width - right + 25 << "\" y=\"" << ly << "\">" << label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace nmar

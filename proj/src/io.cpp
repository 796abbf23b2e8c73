#include "sg/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sg {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
    std::string row;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) row += ',';
        row += format_double(values[i]);
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& cells) {
    std::string row;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_comment(const std::string& line) {
    comments_.push_back(line);
}

std::string CsvWriter::to_string(uint64_t config_hash, int n) const {
    std::ostringstream out;
    for (size_t i = 0; i < header_.size(); ++i)
        out << (i ? "," : "") << header_[i];
    out << "\n";
    for (const auto& r : rows_) out << r << "\n";
    for (const auto& c : comments_) out << "# " << c << "\n";
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx",
                  (unsigned long long)config_hash);
    out << "# config_hash=" << hash << " n=" << n << "\n";
    return out.str();
}

void CsvWriter::write(const std::string& path, uint64_t config_hash,
                      int n) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << to_string(config_hash, n);
}

void write_pgm(const std::string& path, const ScalarField& f) {
    const double lo = field_min(f), hi = field_max(f);
    const double span = hi > lo ? hi - lo : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << "P2\n";
    out << "# min=" << format_double(lo) << " max=" << format_double(hi)
        << " (gray = 255*(v-min)/(max-min))\n";
    out << f.n() << " " << f.n() << "\n255\n";
    for (int iy = f.n() - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < f.n(); ++ix) {
            const int g = int(255.0 * (f.at(ix, iy) - lo) / span + 0.5);
            out << g << (ix + 1 == f.n() ? "\n" : " ");
        }
    }
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec)
        throw validation_error("cannot create output directory '" + path +
                               "': " + ec.message());
}

} // namespace sg

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sg/field.hpp"

namespace sg {

/// CSV table with a header row and a trailing metadata comment recording
/// the config hash and grid size. Numeric cells print with %.17g so that
/// identical runs produce bit-identical files.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& cells);
    void add_comment(const std::string& line); // emitted after the rows
    void write(const std::string& path, uint64_t config_hash, int n) const;
    std::string to_string(uint64_t config_hash, int n) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
    std::vector<std::string> comments_;
};

std::string format_double(double v);

/// Plain P2 (ASCII) portable graymap of the field, 255 gray levels; the
/// min/max normalization is recorded in the comment line.
void write_pgm(const std::string& path, const ScalarField& f);

void ensure_directory(const std::string& path);

} // namespace sg

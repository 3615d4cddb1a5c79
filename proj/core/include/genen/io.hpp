#pragma once

#include <string>
#include <vector>

#include "genen/error.hpp"

namespace genen {

/// Doubles are serialized with 17 significant digits everywhere so that
/// re-reading a file reproduces the exact bit pattern.
std::string format_double(double v);

double parse_double(const std::string& s);
long parse_long(const std::string& s);

std::string csv_join(const std::vector<std::string>& fields);

/// Splits one CSV line; empty fields are kept as empty strings.
std::vector<std::string> csv_split(const std::string& line);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Reads a CSV file into rows of fields. Skips a trailing empty line.
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

/// log-spaced grid from lo to hi inclusive (count >= 2, lo, hi > 0).
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace genen

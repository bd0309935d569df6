#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rhsbf {

/// Round-trip decimal form ("%.17g"), "nan"/"inf" for non-finite values.
std::string format_number(double value);

/// Joins fields with commas, quoting any that contain a comma, quote or newline.
std::string csv_line(const std::vector<std::string>& fields);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace rhsbf

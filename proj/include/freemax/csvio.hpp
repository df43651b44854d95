#pragma once

#include <string>
#include <vector>

namespace freemax::csv {

// Shortest round-trip formatting (std::to_chars); locale-free and
// byte-stable, which the determinism checks rely on.
std::string format(double v);
std::string format(long long v);

// one value per line under a `value` header
void write_values(const std::string& path, const std::vector<double>& values);
std::vector<double> read_values(const std::string& path);

// generic comma-separated table; cells are preformatted strings
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_table(const std::string& path,
                                                 std::vector<std::string>* header);

}  // namespace freemax::csv

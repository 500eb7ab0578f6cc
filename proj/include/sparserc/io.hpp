#pragma once

#include "sparserc/core.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sparserc {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);
std::uint64_t parse_uint64(std::string_view s);

std::vector<std::string> split_csv_line(std::string_view line);
std::string join_csv(const std::vector<std::string>& fields);

/// Headerless numeric CSV. Parse errors name the 1-based row and column.
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// One `i,j,w` line per nonzero entry, 0-based indices.
void write_edge_list(const std::filesystem::path& path, const Matrix& w);
Matrix read_edge_list(const std::filesystem::path& path, Index d);

using KeyValues = std::map<std::string, std::string>;

void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);

}  // namespace sparserc

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace firm::io {

/// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::filesystem::path& path, std::span<const char> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

std::vector<char> read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Raw IEEE-754 little-endian arrays.
void write_f32(const std::filesystem::path& path, std::span<const double> values);
void write_f64(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f32(const std::filesystem::path& path);
std::vector<double> read_f64(const std::filesystem::path& path);

}  // namespace firm::io

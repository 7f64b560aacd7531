#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace mongemmd::io {

void write_u8(std::ostream& os, std::uint8_t v);
void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);

// Readers throw InputError on truncated input.
std::uint8_t read_u8(std::istream& is);
std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);

std::uint64_t fnv1a64(const std::string& bytes);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// "%.17g": shortest fixed-width form that round-trips every double.
std::string format_double(double v);

} // namespace mongemmd::io

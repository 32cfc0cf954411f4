#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zetalab/universality_search.hpp"
#include "zetalab/zero_census.hpp"

namespace zetalab::report {

// File could not be written; the message carries the path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Round-trip decimal (%.17g); "nan", "inf", "-inf" for non-finite values.
std::string num(double x);

// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote or
// line break. A table without rows gives the header line only.
std::string to_csv(const Table& t);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Writes atomically enough for our purposes: truncate, write, check.
void write_text(const std::filesystem::path& path, std::string_view text);

// stage, y_k, m_k, stage_error, bound
Table doubling_table(const universality::DoublingSchedule& sched);

// t, r, m, margin, count_zeta, count_product, stage_count, seed
Table scan_table(const std::vector<census::ScanRow>& rows);

}  // namespace zetalab::report

#include "zetalab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace zetalab::report {
namespace {

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += field(row[i]);
  }
  out += "\r\n";
}

}  // namespace

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  append_row(out, t.header);
  for (const auto& r : t.rows) append_row(out, r);
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw IoError("write failed: " + path.string());
}

Table doubling_table(const universality::DoublingSchedule& sched) {
  Table t{{"stage", "y_k", "m_k", "stage_error", "bound"}, {}};
  for (const auto& st : sched.stages) {
    t.rows.push_back({std::to_string(st.k), num(st.y_k), std::to_string(st.m_k), num(st.stage_error),
                      num(st.bound)});
  }
  return t;
}

Table scan_table(const std::vector<census::ScanRow>& rows) {
  Table t{{"t", "r", "m", "margin", "count_zeta", "count_product", "stage_count", "seed"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({num(r.t), num(r.r), num(r.m), num(r.margin), std::to_string(r.count_zeta),
                      std::to_string(r.count_product), std::to_string(r.stage_count),
                      std::to_string(r.seed)});
  }
  return t;
}

}  // namespace zetalab::report

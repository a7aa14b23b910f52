#pragma once

// Minimal CSV: header row, comma separated, LF line endings, doubles printed
// with 17 significant digits so values round-trip exactly.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ep3 {

std::string fmt(double x);
std::string fmt(long long x);
std::string fmt(int x);
std::string fmt(std::uint64_t x);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  /// Throws when the row width differs from the header.
  void row(const std::vector<std::string>& cells);
  [[nodiscard]] const std::string& str() const { return text_; }
  [[nodiscard]] std::size_t rows() const { return rows_; }

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws when missing.
  [[nodiscard]] std::size_t column(const std::string& name) const;
  [[nodiscard]] double number(std::size_t row, std::size_t col) const;
};

/// Parses text produced by CsvWriter (no quoting). Errors carry line numbers.
CsvTable parse_csv(const std::string& text);

/// Writes bytes verbatim (binary mode, so LF stays LF).
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ep3

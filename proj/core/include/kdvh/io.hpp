#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kdvh {

/// Full-precision scientific formatting (17 significant digits), the
/// canonical number format of all emitted artifacts. NaN renders as an empty
/// cell (used for undefined EOC entries).
std::string format_full(double x);

/// Quotes a CSV cell when it contains a comma, quote, or newline.
std::string csv_escape(std::string_view cell);

/// Streaming CSV writer; one header row then data rows. Throws
/// std::runtime_error when the file cannot be opened or written.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void write_header(std::span<const std::string> columns);
  void write_row(std::span<const std::string> cells);
  /// Writes numeric cells in full precision; NaN becomes an empty cell.
  void write_values(std::span<const double> values);
  void flush();

  const std::filesystem::path& path() const { return path_; }
  std::size_t rows_written() const { return rows_; }

 private:
  void write_line(std::span<const std::string> cells);

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t rows_ = 0;
  bool header_written_ = false;
};

/// FNV-1a 64-bit hash used to fingerprint run configurations in metadata.
std::uint64_t fnv1a_hash(std::string_view data);

/// Hash rendered as fixed-width hex.
std::string hash_hex(std::uint64_t h);

/// Writes a whole text file, creating parent directories. Throws on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kdvh

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace starnet::cli {

/// Writes output files under one directory and records their SHA-256 for the
/// manifest. Data files are deterministic; only metadata.json carries the
/// wall-clock timestamp.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  void write_text(const std::string& relative, const std::string& content);
  /// Sorted keys, two-space indent, trailing newline.
  void write_json(const std::string& relative, const nlohmann::json& doc);

  /// Writes metadata.json and manifest.json. Call once, last.
  void finish(const nlohmann::json& metadata);

  const std::filesystem::path& root() const { return root_; }

 private:
  struct Entry {
    std::string path;
    std::string sha256;
    std::uintmax_t bytes = 0;
  };
  std::filesystem::path root_;
  std::vector<Entry> entries_;
};

std::string sha256_hex(const std::string& bytes);

/// RFC 4180 table with CRLF line endings; numbers as %.17g.
class CsvTable {
 public:
  explicit CsvTable(const std::vector<std::string>& header);
  CsvTable& cell(double value);
  CsvTable& cell(long value);
  CsvTable& cell(const std::string& value);
  void end_row();
  const std::string& str() const { return text_; }

 private:
  std::string text_;
  bool row_start_ = true;
};

std::string utc_timestamp();

}  // namespace starnet::cli

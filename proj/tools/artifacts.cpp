#include "artifacts.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace starnet::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

ArtifactWriter::ArtifactWriter(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void ArtifactWriter::write_text(const std::string& relative, const std::string& content) {
  const fs::path target = root_ / relative;
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write " + target.string());
  entries_.push_back({relative, sha256_hex(content), content.size()});
}

void ArtifactWriter::write_json(const std::string& relative, const nlohmann::json& doc) {
  write_text(relative, doc.dump(2) + "\n");
}

void ArtifactWriter::finish(const nlohmann::json& metadata) {
  const std::string meta = metadata.dump(2) + "\n";
  std::ofstream(root_ / "metadata.json", std::ios::binary | std::ios::trunc) << meta;

  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.path < b.path; });
  nlohmann::json files = nlohmann::json::array();
  for (const auto& e : entries_) files.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  // The timestamp makes metadata.json differ between runs, so it is listed
  // without a hash to keep the manifest itself reproducible.
  files.push_back({{"path", "metadata.json"}, {"sha256", nullptr}, {"volatile", true}});
  const nlohmann::json manifest{{"files", files}};
  std::ofstream(root_ / "manifest.json", std::ios::binary | std::ios::trunc) << manifest.dump(2) << "\n";
}

CsvTable::CsvTable(const std::vector<std::string>& header) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvTable& CsvTable::cell(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return cell(std::string(buf));
}

CsvTable& CsvTable::cell(long value) { return cell(std::to_string(value)); }

CsvTable& CsvTable::cell(const std::string& value) {
  if (!row_start_) text_ += ',';
  row_start_ = false;
  if (value.find_first_of(",\"\r\n") == std::string::npos) {
    text_ += value;
  } else {
    text_ += '"';
    for (char c : value) {
      if (c == '"') text_ += '"';
      text_ += c;
    }
    text_ += '"';
  }
  return *this;
}

void CsvTable::end_row() {
  text_ += "\r\n";
  row_start_ = true;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace starnet::cli

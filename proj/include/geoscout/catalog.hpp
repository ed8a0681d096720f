#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geoscout/core.hpp"

namespace geoscout {

struct SourceRecord {
  std::string id;
  Modality modality = Modality::CT;
  std::filesystem::path image_path;
  std::optional<std::string> series_id;  // required for CT/MRI
  std::optional<int> z;                  // required for CT/MRI
  std::optional<std::string> embedding_id;
};

// In-memory source catalog with the lookups reference selection needs.
class SourceCatalog {
 public:
  SourceCatalog() = default;
  explicit SourceCatalog(std::vector<SourceRecord> records);

  const std::vector<SourceRecord>& records() const { return records_; }
  const SourceRecord* find(const std::string& id) const;
  const SourceRecord* find_by_embedding(const std::string& embedding_id) const;
  // Slice z of a series, or nullptr.
  const SourceRecord* slice(const std::string& series_id, int z) const;

 private:
  std::vector<SourceRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_embedding_;
  std::unordered_map<std::string, std::map<int, std::size_t>> series_;
};

// JSON-lines: {"id","modality":"ct|mri|xray","path","series_id"?,"z"?,"embedding_id"?}.
// Relative paths resolve against the catalog file's directory.
SourceCatalog load_catalog(const std::filesystem::path& path);

}  // namespace geoscout

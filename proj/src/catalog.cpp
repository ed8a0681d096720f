#include "geoscout/catalog.hpp"

#include <fstream>

#include "json.hpp"

namespace geoscout {

SourceCatalog::SourceCatalog(std::vector<SourceRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!by_id_.emplace(r.id, i).second) throw DuplicateId("catalog id '" + r.id + "'");
    if (r.embedding_id) by_embedding_.emplace(*r.embedding_id, i);
    if (is_volumetric(r.modality)) {
      if (!r.series_id || !r.z)
        throw InvalidArgument("volumetric record '" + r.id + "' needs series_id and z");
      series_[*r.series_id][*r.z] = i;
    }
  }
}

const SourceRecord* SourceCatalog::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

const SourceRecord* SourceCatalog::find_by_embedding(const std::string& embedding_id) const {
  auto it = by_embedding_.find(embedding_id);
  return it == by_embedding_.end() ? nullptr : &records_[it->second];
}

const SourceRecord* SourceCatalog::slice(const std::string& series_id, int z) const {
  auto s = series_.find(series_id);
  if (s == series_.end()) return nullptr;
  auto it = s->second.find(z);
  return it == s->second.end() ? nullptr : &records_[it->second];
}

SourceCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog '" + path.string() + "'");
  const auto base = path.parent_path();
  std::vector<SourceRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SourceRecord r;
      r.id = j.at("id").get<std::string>();
      r.modality = parse_modality(j.at("modality").get<std::string>());
      std::filesystem::path p = j.at("path").get<std::string>();
      r.image_path = p.is_relative() ? base / p : p;
      if (j.contains("series_id")) r.series_id = j["series_id"].get<std::string>();
      if (j.contains("z")) r.z = j["z"].get<int>();
      if (j.contains("embedding_id")) r.embedding_id = j["embedding_id"].get<std::string>();
      if (is_volumetric(r.modality) && (!r.series_id || !r.z))
        throw InvalidArgument("volumetric record needs series_id and z");
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(lineno, e.what());
    } catch (const InvalidArgument& e) {
      throw SchemaError(lineno, e.what());
    }
  }
  return SourceCatalog(std::move(records));
}

}  // namespace geoscout

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoscout {

// Read-only id -> vector store with uniform dimension. Entries are kept in
// lexicographic id order, which is also the retrieval tie-break order.
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;
  EmbeddingIndex(std::vector<std::string> ids, std::vector<std::vector<float>> vectors);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t dimension() const { return dim_; }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  std::span<const float> vector(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }
  double norm(std::size_t i) const { return norms_[i]; }
  std::optional<std::size_t> position(std::string_view id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::size_t dim_ = 0;
};

// JSON-lines {"id","vector":[...]}; dimension fixed by the first record.
EmbeddingIndex load_embeddings(const std::filesystem::path& path);

// Id maximizing cosine similarity to the query, skipping `exclude`. Ties go to
// the lexicographically smallest id. Entries are scanned in parallel.
std::string top1_similar(std::span<const float> query, const EmbeddingIndex& index,
                         std::optional<std::string_view> exclude = std::nullopt);

namespace serial {
std::string top1_similar(std::span<const float> query, const EmbeddingIndex& index,
                         std::optional<std::string_view> exclude = std::nullopt);
}  // namespace serial

}  // namespace geoscout

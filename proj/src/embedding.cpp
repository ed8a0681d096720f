#include "geoscout/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "geoscout/error.hpp"
#include "json.hpp"

namespace geoscout {

EmbeddingIndex::EmbeddingIndex(std::vector<std::string> ids, std::vector<std::vector<float>> vectors) {
  if (ids.size() != vectors.size()) throw InvalidArgument("ids and vectors differ in length");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  dim_ = vectors.empty() ? 0 : vectors.front().size();
  ids_.reserve(ids.size());
  data_.reserve(ids.size() * dim_);
  for (std::size_t n = 0; n < order.size(); ++n) {
    const auto& v = vectors[order[n]];
    if (v.size() != dim_ || dim_ == 0)
      throw DimensionMismatch("embedding '" + ids[order[n]] + "' has dimension " + std::to_string(v.size()) +
                              ", expected " + std::to_string(dim_));
    if (n > 0 && ids[order[n]] == ids_.back()) throw DuplicateId("embedding '" + ids_.back() + "'");
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * x;
    if (!(sq > 0.0) || !std::isfinite(sq))
      throw InvalidArgument("embedding '" + ids[order[n]] + "' has zero or non-finite norm");
    ids_.push_back(ids[order[n]]);
    data_.insert(data_.end(), v.begin(), v.end());
    norms_.push_back(std::sqrt(sq));
  }
}

std::optional<std::size_t> EmbeddingIndex::position(std::string_view id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

EmbeddingIndex load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding index '" + path.string() + "'");
  std::vector<std::string> ids;
  std::vector<std::vector<float>> vecs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ids.push_back(j.at("id").get<std::string>());
      vecs.push_back(j.at("vector").get<std::vector<float>>());
      if (vecs.back().size() != vecs.front().size())
        throw SchemaError(lineno, "vector dimension " + std::to_string(vecs.back().size()) + " != " +
                                      std::to_string(vecs.front().size()));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(lineno, e.what());
    }
  }
  return EmbeddingIndex(std::move(ids), std::move(vecs));
}

namespace {

struct Best {
  double score = -2.0;
  std::size_t pos = static_cast<std::size_t>(-1);
  // Entries are id-sorted, so a smaller position is the lexicographic tie-break.
  bool improves(double s, std::size_t p) const { return s > score || (s == score && p < pos); }
};

double cosine(std::span<const float> q, double qnorm, const EmbeddingIndex& index, std::size_t i) {
  const auto x = index.vector(i);
  double dot = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) dot += static_cast<double>(q[d]) * x[d];
  return dot / (qnorm * index.norm(i));
}

struct Query {
  double norm;
  std::size_t skip;
};

Query prepare(std::span<const float> query, const EmbeddingIndex& index, std::optional<std::string_view> exclude) {
  if (index.empty()) throw EmptyIndex("embedding index has no entries");
  if (query.size() != index.dimension())
    throw DimensionMismatch("query dimension " + std::to_string(query.size()) + " != index dimension " +
                            std::to_string(index.dimension()));
  double sq = 0.0;
  for (float x : query) sq += static_cast<double>(x) * x;
  if (!(sq > 0.0)) throw InvalidArgument("query vector has zero norm");
  std::size_t skip = static_cast<std::size_t>(-1);
  if (exclude) {
    if (auto p = index.position(*exclude)) skip = *p;
  }
  const std::size_t usable = index.size() - (skip < index.size() ? 1 : 0);
  if (usable == 0) throw EmptyIndex("no entries besides the excluded id");
  return {std::sqrt(sq), skip};
}

}  // namespace

std::string top1_similar(std::span<const float> query, const EmbeddingIndex& index,
                         std::optional<std::string_view> exclude) {
  const Query q = prepare(query, index, exclude);
  const auto n = static_cast<std::ptrdiff_t>(index.size());
  Best best;
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto p = static_cast<std::size_t>(i);
      if (p == q.skip) continue;
      const double s = cosine(query, q.norm, index, p);
      if (local.improves(s, p)) local = {s, p};
    }
#pragma omp critical(geoscout_top1)
    {
      if (local.pos != static_cast<std::size_t>(-1) && best.improves(local.score, local.pos)) best = local;
    }
  }
  return index.id(best.pos);
}

namespace serial {
std::string top1_similar(std::span<const float> query, const EmbeddingIndex& index,
                         std::optional<std::string_view> exclude) {
  const Query q = prepare(query, index, exclude);
  Best best;
  for (std::size_t p = 0; p < index.size(); ++p) {
    if (p == q.skip) continue;
    const double s = cosine(query, q.norm, index, p);
    if (best.improves(s, p)) best = {s, p};
  }
  return index.id(best.pos);
}
}  // namespace serial

}  // namespace geoscout

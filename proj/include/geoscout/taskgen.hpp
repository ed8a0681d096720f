#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geoscout/catalog.hpp"
#include "geoscout/core.hpp"
#include "geoscout/embedding.hpp"
#include "geoscout/image.hpp"
#include "geoscout/rng.hpp"

namespace geoscout {

// ---------------------------------------------------------------------------
// Hierarchical scale localization
// ---------------------------------------------------------------------------

struct ScaleTaskSpec {
  int num_patches = 3;
  // Area fractions; ratios[i] is scale level i+1.
  std::vector<double> ratios{0.20, 0.0625};
  double roi_min = 0.2;
  double roi_max = 0.8;
  // (width, height) of the resized patches; unset means the source size.
  std::optional<std::pair<int, int>> resize_target;

  void validate() const;
};

struct ScaleTask {
  ImageBuffer global;
  std::vector<ImageBuffer> patches;
  std::vector<BBox> boxes;
  std::vector<int> levels;       // 1-based scale levels
  std::vector<PixelRect> crops;  // source-pixel crop of each patch
};

// Square crop side for an area ratio: floor(sqrt(r * W * H)).
int scale_side_length(double ratio, int width, int height);

// Inclusive integer range of legal top-left offsets along one axis.
struct OffsetRange {
  int lo;
  int hi;
};
OffsetRange scale_offset_range(int extent, int side, double roi_min, double roi_max);

ScaleTask gen_scale_task(const ImageBuffer& img, const ScaleTaskSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Topological jigsaw
// ---------------------------------------------------------------------------

struct JigsawTask {
  ImageBuffer shuffled;
  Permutation sigma;  // position i of `shuffled` holds original cell sigma[i]
  GridSpec grid;
  PixelRect crop;  // grid-divisible crop of the source
};

inline constexpr int kMinPatchSide = 8;

// Uniform over all permutations of n except the identity.
Permutation sample_non_identity_permutation(int n, Rng& rng);

JigsawTask gen_jigsaw_task(const ImageBuffer& img, const GridSpec& grid, std::uint64_t seed);
// Same construction with a caller-chosen permutation (identity allowed).
JigsawTask make_jigsaw(const ImageBuffer& img, const GridSpec& grid, const Permutation& sigma);
// Undo the shuffle: returns the grid-cropped original.
ImageBuffer reconstruct_jigsaw(const ImageBuffer& shuffled, const GridSpec& grid, const Permutation& sigma);

// ---------------------------------------------------------------------------
// Anomaly consistency (cut-paste)
// ---------------------------------------------------------------------------

struct AnomalyTaskSpec {
  GridSpec grid{4, 4};
  std::vector<int> centers{5, 6, 9, 10};
  double noise_sigma = 0.05;  // normalized intensity
  int boundary_width = 2;     // pixels on each side of the seam
  int slice_offset = 1;       // z distance to the reference slice, 1..5

  void validate() const;
};

struct AnomalyTask {
  ImageBuffer corrupted;
  int k_star;
  std::string reference_id;
  GridSpec grid;
  PixelRect crop;
};

struct ResolvedReference {
  std::string id;
  ImageBuffer image;
};

// Supplies the hard-negative reference for a target record.
class ReferenceProvider {
 public:
  virtual ~ReferenceProvider() = default;
  virtual ResolvedReference resolve(const SourceRecord& target) const = 0;
};

// Pixels that blending may touch: cell `k` dilated by `width` minus the cell
// eroded by `width` (a 2*width strip straddling the seam), clipped to the image.
bool in_seam_band(int x, int y, PixelRect cell, int width, int img_w, int img_h);

// Paste cell k* of the reference into the target and blend the seam with noise.
AnomalyTask inject_anomaly(const ImageBuffer& img, const ImageBuffer& reference, const std::string& reference_id,
                           const AnomalyTaskSpec& spec, std::uint64_t seed);

AnomalyTask gen_anomaly_task(const ImageBuffer& img, const SourceRecord& record, const AnomalyTaskSpec& spec,
                             const ReferenceProvider& refs, std::uint64_t seed);

// Adjacent slice (z + offset first, then z - offset) for CT/MRI; top-1 cosine
// neighbour (excluding itself) for X-ray.
const SourceRecord& select_reference(const SourceRecord& record, const SourceCatalog& catalog,
                                     const EmbeddingIndex& index, int offset);

// Reference provider backed by a catalog, embedding index and PNG files.
class CatalogReferenceProvider : public ReferenceProvider {
 public:
  using Loader = std::function<ImageBuffer(const SourceRecord&)>;
  CatalogReferenceProvider(const SourceCatalog& catalog, const EmbeddingIndex& index, int offset,
                           Loader loader = {});
  ResolvedReference resolve(const SourceRecord& target) const override;

 private:
  const SourceCatalog& catalog_;
  const EmbeddingIndex& index_;
  int offset_;
  Loader loader_;
};

}  // namespace geoscout

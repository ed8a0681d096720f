#include "geoscout/taskgen.hpp"

#include <algorithm>
#include <cmath>

#include "geoscout/geometry.hpp"

namespace geoscout {

// ---------------------------------------------------------------------------
// Scale
// ---------------------------------------------------------------------------

void ScaleTaskSpec::validate() const {
  if (num_patches < 1 || num_patches > 3) throw InvalidArgument("num_patches must be 1, 2 or 3");
  if (ratios.empty()) throw InvalidArgument("at least one scale ratio is required");
  for (double r : ratios)
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("scale ratios must lie in (0,1)");
  if (!(0.0 <= roi_min && roi_min < roi_max && roi_max <= 1.0))
    throw InvalidArgument("ROI bounds must satisfy 0 <= min < max <= 1");
  if (resize_target && (resize_target->first < 4 || resize_target->second < 4))
    throw InvalidArgument("resize target must be at least 4x4");
}

int scale_side_length(double ratio, int width, int height) {
  return static_cast<int>(std::floor(std::sqrt(ratio * static_cast<double>(height) * width)));
}

OffsetRange scale_offset_range(int extent, int side, double roi_min, double roi_max) {
  return {static_cast<int>(std::ceil(roi_min * extent)), static_cast<int>(std::floor(roi_max * extent - side))};
}

ScaleTask gen_scale_task(const ImageBuffer& img, const ScaleTaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int W = img.width(), H = img.height();
  // Feasibility is checked for every ratio up front so failure does not
  // depend on which ratios the seed happens to draw.
  for (double r : spec.ratios) {
    const int l = scale_side_length(r, W, H);
    if (l < kMinPatchSide)
      throw ImageTooSmall("crop side " + std::to_string(l) + " px for ratio " + std::to_string(r));
    const auto xr = scale_offset_range(W, l, spec.roi_min, spec.roi_max);
    const auto yr = scale_offset_range(H, l, spec.roi_min, spec.roi_max);
    if (xr.lo > xr.hi || yr.lo > yr.hi)
      throw InfeasibleCrop("side " + std::to_string(l) + " px does not fit the ROI of a " + std::to_string(W) +
                           "x" + std::to_string(H) + " image");
  }
  const int out_w = spec.resize_target ? spec.resize_target->first : W;
  const int out_h = spec.resize_target ? spec.resize_target->second : H;

  Rng rng(seed);
  ScaleTask task{img, {}, {}, {}, {}};
  for (int k = 0; k < spec.num_patches; ++k) {
    const auto level_index = static_cast<std::size_t>(rng.below(spec.ratios.size()));
    const int l = scale_side_length(spec.ratios[level_index], W, H);
    const auto xr = scale_offset_range(W, l, spec.roi_min, spec.roi_max);
    const auto yr = scale_offset_range(H, l, spec.roi_min, spec.roi_max);
    const int x = static_cast<int>(rng.between(xr.lo, xr.hi));
    const int y = static_cast<int>(rng.between(yr.lo, yr.hi));
    const PixelRect r{x, y, l, l};
    task.patches.push_back(resize_bilinear(crop(img, r), out_w, out_h));
    task.boxes.emplace_back(static_cast<double>(x) / W, static_cast<double>(y) / H, static_cast<double>(x + l) / W,
                            static_cast<double>(y + l) / H);
    task.levels.push_back(static_cast<int>(level_index) + 1);
    task.crops.push_back(r);
  }
  return task;
}

// ---------------------------------------------------------------------------
// Jigsaw
// ---------------------------------------------------------------------------

Permutation sample_non_identity_permutation(int n, Rng& rng) {
  if (n < 2) throw InvalidArgument("a non-identity permutation needs n >= 2");
  std::vector<int> m(static_cast<std::size_t>(n));
  for (;;) {
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(m[static_cast<std::size_t>(i)], m[j]);
    }
    Permutation p(m);
    if (!p.is_identity()) return p;
  }
}

namespace {

PixelRect checked_grid_crop(const ImageBuffer& img, const GridSpec& grid) {
  const PixelRect r = grid_crop_rect(img.width(), img.height(), grid);
  if (r.w / grid.cols() < kMinPatchSide || r.h / grid.rows() < kMinPatchSide)
    throw ImageTooSmall(std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image on grid " +
                        grid.str() + " gives patches under " + std::to_string(kMinPatchSide) + " px");
  return r;
}

// out[position i] = in[cell map[i]]
ImageBuffer place_cells(const ImageBuffer& in, const GridSpec& grid, const Permutation& map) {
  ImageBuffer out(in.width(), in.height(), in.channels());
  for (int i = 0; i < grid.cells(); ++i) {
    const PixelRect dst = grid_cell_rect(in, grid, i);
    const PixelRect src = grid_cell_rect(in, grid, map[i]);
    paste(out, crop(in, src), dst.x, dst.y);
  }
  return out;
}

}  // namespace

JigsawTask make_jigsaw(const ImageBuffer& img, const GridSpec& grid, const Permutation& sigma) {
  if (sigma.size() != grid.cells()) throw InvalidArgument("permutation length does not match grid " + grid.str());
  const PixelRect r = checked_grid_crop(img, grid);
  const ImageBuffer base = crop(img, r);
  return {place_cells(base, grid, sigma), sigma, grid, r};
}

JigsawTask gen_jigsaw_task(const ImageBuffer& img, const GridSpec& grid, std::uint64_t seed) {
  checked_grid_crop(img, grid);
  Rng rng(seed);
  return make_jigsaw(img, grid, sample_non_identity_permutation(grid.cells(), rng));
}

ImageBuffer reconstruct_jigsaw(const ImageBuffer& shuffled, const GridSpec& grid, const Permutation& sigma) {
  // Original cell j sits at shuffled position inverse(sigma)[j].
  return place_cells(shuffled, grid, permutation_inverse(sigma));
}

// ---------------------------------------------------------------------------
// Anomaly
// ---------------------------------------------------------------------------

void AnomalyTaskSpec::validate() const {
  if (centers.empty()) throw InvalidArgument("center index set is empty");
  for (int c : centers)
    if (c < 0 || c >= grid.cells())
      throw InvalidArgument("center index " + std::to_string(c) + " outside grid " + grid.str());
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidArgument("noise sigma must be >= 0");
  if (boundary_width < 0) throw InvalidArgument("boundary width must be >= 0");
  if (slice_offset < 1 || slice_offset > 5) throw InvalidArgument("slice offset must be in 1..5");
}

bool in_seam_band(int x, int y, PixelRect cell, int width, int img_w, int img_h) {
  if (width <= 0 || x < 0 || y < 0 || x >= img_w || y >= img_h) return false;
  const bool dilated = x >= cell.x - width && x < cell.x + cell.w + width && y >= cell.y - width &&
                       y < cell.y + cell.h + width;
  const bool eroded = x >= cell.x + width && x < cell.x + cell.w - width && y >= cell.y + width &&
                      y < cell.y + cell.h - width;
  return dilated && !eroded;
}

AnomalyTask inject_anomaly(const ImageBuffer& img, const ImageBuffer& reference, const std::string& reference_id,
                           const AnomalyTaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (reference == img) throw DegenerateReference("reference '" + reference_id + "' is identical to the target");
  const PixelRect r = checked_grid_crop(img, spec.grid);
  ImageBuffer out = crop(img, r);

  ImageBuffer ref = to_channels(reference, img.channels());
  if (ref.width() == img.width() && ref.height() == img.height())
    ref = crop(ref, r);
  else
    ref = resize_bilinear(ref, r.w, r.h);

  Rng rng(seed);
  const int k_star = spec.centers[static_cast<std::size_t>(rng.below(spec.centers.size()))];
  const PixelRect cell = grid_cell_rect(out, spec.grid, k_star);
  paste(out, crop(ref, cell), cell.x, cell.y);

  const int d = spec.boundary_width;
  if (spec.noise_sigma > 0.0 && d > 0) {
    const int y0 = std::max(0, cell.y - d), y1 = std::min(out.height(), cell.y + cell.h + d);
    const int x0 = std::max(0, cell.x - d), x1 = std::min(out.width(), cell.x + cell.w + d);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) {
        if (!in_seam_band(x, y, cell, d, out.width(), out.height())) continue;
        for (int c = 0; c < out.channels(); ++c) {
          const double v = std::clamp(out.normalized(x, y, c) + spec.noise_sigma * rng.normal(), 0.0, 1.0);
          out.at(x, y, c) = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
        }
      }
  }
  return {std::move(out), k_star, reference_id, spec.grid, r};
}

AnomalyTask gen_anomaly_task(const ImageBuffer& img, const SourceRecord& record, const AnomalyTaskSpec& spec,
                             const ReferenceProvider& refs, std::uint64_t seed) {
  spec.validate();
  checked_grid_crop(img, spec.grid);
  ResolvedReference ref = refs.resolve(record);
  return inject_anomaly(img, ref.image, ref.id, spec, seed);
}

const SourceRecord& select_reference(const SourceRecord& record, const SourceCatalog& catalog,
                                     const EmbeddingIndex& index, int offset) {
  if (is_volumetric(record.modality)) {
    if (!record.series_id || !record.z) throw ReferenceUnavailable("'" + record.id + "' has no series/z");
    for (int z : {*record.z + offset, *record.z - offset})
      if (const SourceRecord* s = catalog.slice(*record.series_id, z)) return *s;
    throw ReferenceUnavailable("no slice at z" + std::to_string(*record.z) + "+-" + std::to_string(offset) +
                               " in series '" + *record.series_id + "'");
  }
  if (!record.embedding_id) throw ReferenceUnavailable("'" + record.id + "' has no embedding id");
  if (index.empty()) throw ReferenceUnavailable("embedding index is empty");
  const auto pos = index.position(*record.embedding_id);
  if (!pos) throw ReferenceUnavailable("embedding '" + *record.embedding_id + "' not in index");
  std::string hit;
  try {
    hit = top1_similar(index.vector(*pos), index, *record.embedding_id);
  } catch (const EmptyIndex& e) {
    throw ReferenceUnavailable(e.what());
  }
  const SourceRecord* s = catalog.find_by_embedding(hit);
  if (!s) throw ReferenceUnavailable("embedding '" + hit + "' has no catalog record");
  return *s;
}

CatalogReferenceProvider::CatalogReferenceProvider(const SourceCatalog& catalog, const EmbeddingIndex& index,
                                                   int offset, Loader loader)
    : catalog_(catalog), index_(index), offset_(offset), loader_(std::move(loader)) {
  if (!loader_) loader_ = [](const SourceRecord& r) { return read_png(r.image_path); };
}

ResolvedReference CatalogReferenceProvider::resolve(const SourceRecord& target) const {
  const SourceRecord& ref = select_reference(target, catalog_, index_, offset_);
  return {ref.id, loader_(ref)};
}

}  // namespace geoscout

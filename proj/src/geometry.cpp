#include "geoscout/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace geoscout {

double bbox_iou(const RawBox& a, const RawBox& b) {
  if (a.degenerate() || b.degenerate()) return 0.0;
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

GridCoord flat_to_grid(int k, const GridSpec& grid) {
  if (k < 0 || k >= grid.cells())
    throw IndexError("flat index " + std::to_string(k) + " outside grid " + grid.str());
  return {k / grid.cols(), k % grid.cols()};
}

int grid_to_flat(GridCoord c, const GridSpec& grid) {
  if (c.u < 0 || c.u >= grid.rows() || c.v < 0 || c.v >= grid.cols())
    throw IndexError("coordinate (" + std::to_string(c.u) + "," + std::to_string(c.v) +
                     ") outside grid " + grid.str());
  return c.u * grid.cols() + c.v;
}

Permutation permutation_inverse(const Permutation& p) {
  std::vector<int> inv(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) inv[static_cast<std::size_t>(p[i])] = i;
  return Permutation(std::move(inv));
}

}  // namespace geoscout

#pragma once

#include "geoscout/core.hpp"

namespace geoscout {

// Intersection over union. Degenerate boxes (x1 >= x2 or y1 >= y2, possible
// only for parsed predictions) score 0.
double bbox_iou(const RawBox& a, const RawBox& b);
inline double bbox_iou(const BBox& a, const BBox& b) { return bbox_iou(a.raw(), b.raw()); }

GridCoord flat_to_grid(int k, const GridSpec& grid);
int grid_to_flat(GridCoord c, const GridSpec& grid);

Permutation permutation_inverse(const Permutation& p);

}  // namespace geoscout

#pragma once

#include <array>
#include <vector>

#include "czd/heatmap.hpp"

namespace czd {

/// Knobs for cluster-region selection from a binarized heatmap.
struct LsmConfig {
  int grid_cols = 16;      // cells across image width
  int grid_rows = 10;      // cells down image height
  int top_k = 15;          // densest cells considered for merging
  int max_crops = 2;       // regions kept after area sorting (k)
  double enlarge = 1.2;    // rect scale factor about the rect center
  double threshold = 0.1;  // heatmap binarization cut

  bool valid() const {
    return grid_cols >= 1 && grid_rows >= 1 && top_k >= 0 &&
           top_k <= grid_cols * grid_rows && max_crops >= 0 && enlarge >= 1.0;
  }
};

/// Axis-aligned pixel rectangle, corner form.
struct PixelRect {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  bool contains(double x, double y) const {
    return x >= left && x <= right() && y >= top && y <= bottom();
  }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// One merged crop rectangle with its aggregate cell density.
struct ClusterRegion {
  PixelRect rect;
  double density = 0.0;  // sum of member-cell set-bit counts
  int cell_count = 0;

  friend bool operator==(const ClusterRegion&, const ClusterRegion&) = default;
};

/// Per-cell set-bit counts, indexed (col, row) with col varying slowest so
/// index order equals (col, row) lexicographic order.
struct DensityGrid {
  int cols = 0;
  int rows = 0;
  std::vector<double> counts;

  double at(int col, int row) const {
    return counts[static_cast<std::size_t>(col) * rows + row];
  }
  double& at(int col, int row) {
    return counts[static_cast<std::size_t>(col) * rows + row];
  }
};

/// Affine map from a source region in image coordinates onto a fixed-size
/// detector canvas: canvas = (image - region origin) * scale.
struct CropTransform {
  ClusterRegion region;
  std::array<double, 2> scale{1.0, 1.0};
  std::array<double, 2> offset{0.0, 0.0};

  std::array<double, 2> to_canvas(double x, double y) const {
    return {x * scale[0] + offset[0], y * scale[1] + offset[1]};
  }
  std::array<double, 2> to_image(double x, double y) const {
    return {(x - offset[0]) / scale[0], (y - offset[1]) / scale[1]};
  }
};

/// Count set bits per grid cell. Cells partition the mask; when a dimension
/// is not divisible by the grid, the last row/column of cells absorbs the
/// remainder pixels.
DensityGrid grid_densities(const BinaryMask& mask, const LsmConfig& cfg);

/// Pixel rect covered by cell (col, row) under cfg's partition of a
/// width × height mask.
PixelRect cell_rect(int col, int row, int width, int height,
                    const LsmConfig& cfg);

/// Dense-cell selection and merging: take the top_k cells by density
/// (ties broken by (col, row) order, zero-density cells never selected),
/// merge 8-connected selections into components, turn each component into
/// the bounding rect of its member cells, sort by pixel area descending
/// (ties: higher density, then (left, top)), keep the first max_crops,
/// enlarge each about its center, and clamp to the mask bounds.
std::vector<ClusterRegion> select_regions(const BinaryMask& mask,
                                          const LsmConfig& cfg);

/// binarize + select_regions in one step.
std::vector<ClusterRegion> lsm_pipeline(const Heatmap& hm,
                                        const LsmConfig& cfg);

/// Map from region pixels onto a target_w × target_h canvas with
/// independent axis scales. Throws std::invalid_argument on a zero-area
/// region.
CropTransform crop_and_rescale(const ClusterRegion& region, int target_w,
                               int target_h);

/// Whole-image pass-through view (scale 1, zero offset).
CropTransform identity_view(int width, int height);

}  // namespace czd

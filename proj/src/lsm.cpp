#include "czd/lsm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace czd {

namespace {

// Half-open pixel span [begin, end) of grid index i along an axis of
// `extent` pixels split into `cells` cells; the last cell absorbs the
// remainder.
std::pair<int, int> cell_span(int i, int extent, int cells) {
  int base = extent / cells;
  int begin = i * base;
  int end = (i + 1 == cells) ? extent : begin + base;
  return {begin, end};
}

}  // namespace

PixelRect cell_rect(int col, int row, int width, int height,
                    const LsmConfig& cfg) {
  auto [x0, x1] = cell_span(col, width, cfg.grid_cols);
  auto [y0, y1] = cell_span(row, height, cfg.grid_rows);
  return PixelRect{static_cast<double>(x0), static_cast<double>(y0),
                   static_cast<double>(x1 - x0), static_cast<double>(y1 - y0)};
}

DensityGrid grid_densities(const BinaryMask& mask, const LsmConfig& cfg) {
  if (!cfg.valid()) throw std::invalid_argument("invalid region config");
  if (mask.width <= 0 || mask.height <= 0) {
    throw std::invalid_argument("mask must be non-empty");
  }
  DensityGrid grid;
  grid.cols = cfg.grid_cols;
  grid.rows = cfg.grid_rows;
  grid.counts.assign(static_cast<std::size_t>(grid.cols) * grid.rows, 0.0);
  for (int col = 0; col < grid.cols; ++col) {
    auto [x0, x1] = cell_span(col, mask.width, cfg.grid_cols);
    for (int row = 0; row < grid.rows; ++row) {
      auto [y0, y1] = cell_span(row, mask.height, cfg.grid_rows);
      double count = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) count += mask.at(y, x) ? 1.0 : 0.0;
      }
      grid.at(col, row) = count;
    }
  }
  return grid;
}

std::vector<ClusterRegion> select_regions(const BinaryMask& mask,
                                          const LsmConfig& cfg) {
  DensityGrid grid = grid_densities(mask, cfg);
  int cols = grid.cols, rows = grid.rows;

  // Top-k cells by density; (col, row) order breaks ties and empty cells
  // are never dense.
  std::vector<int> order(grid.counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (grid.counts[a] != grid.counts[b]) {
      return grid.counts[a] > grid.counts[b];
    }
    return a < b;  // index order is (col, row) lexicographic
  });
  std::vector<std::uint8_t> picked(grid.counts.size(), 0);
  int taken = 0;
  for (int idx : order) {
    if (taken >= cfg.top_k) break;
    if (grid.counts[idx] <= 0.0) break;  // sorted, so the rest are zero too
    picked[idx] = 1;
    ++taken;
  }

  // Merge picked cells into 8-connected components with an iterative
  // depth-first walk over the grid.
  std::vector<std::uint8_t> seen(grid.counts.size(), 0);
  std::vector<ClusterRegion> regions;
  for (std::size_t start = 0; start < picked.size(); ++start) {
    if (!picked[start] || seen[start]) continue;
    std::vector<int> stack{static_cast<int>(start)};
    seen[start] = 1;
    double min_l = 1e300, min_t = 1e300, max_r = -1e300, max_b = -1e300;
    double density = 0.0;
    int cells = 0;
    while (!stack.empty()) {
      int idx = stack.back();
      stack.pop_back();
      int col = idx / rows, row = idx % rows;
      PixelRect r = cell_rect(col, row, mask.width, mask.height, cfg);
      min_l = std::min(min_l, r.left);
      min_t = std::min(min_t, r.top);
      max_r = std::max(max_r, r.right());
      max_b = std::max(max_b, r.bottom());
      density += grid.counts[idx];
      ++cells;
      for (int dc = -1; dc <= 1; ++dc) {
        for (int dr = -1; dr <= 1; ++dr) {
          if (dc == 0 && dr == 0) continue;
          int nc = col + dc, nr = row + dr;
          if (nc < 0 || nc >= cols || nr < 0 || nr >= rows) continue;
          int nidx = nc * rows + nr;
          if (!picked[nidx] || seen[nidx]) continue;
          seen[nidx] = 1;
          stack.push_back(nidx);
        }
      }
    }
    regions.push_back(ClusterRegion{
        PixelRect{min_l, min_t, max_r - min_l, max_b - min_t}, density,
        cells});
  }

  // Largest crops first; density then position settle ties.
  std::stable_sort(regions.begin(), regions.end(),
                   [](const ClusterRegion& a, const ClusterRegion& b) {
                     double aa = a.rect.area(), ba = b.rect.area();
                     if (aa != ba) return aa > ba;
                     if (a.density != b.density) return a.density > b.density;
                     return std::tie(a.rect.left, a.rect.top) <
                            std::tie(b.rect.left, b.rect.top);
                   });
  if (static_cast<int>(regions.size()) > cfg.max_crops) {
    regions.resize(cfg.max_crops);
  }

  for (ClusterRegion& region : regions) {
    double cx = region.rect.left + region.rect.width / 2.0;
    double cy = region.rect.top + region.rect.height / 2.0;
    double w = region.rect.width * cfg.enlarge;
    double h = region.rect.height * cfg.enlarge;
    double left = std::clamp(cx - w / 2.0, 0.0, static_cast<double>(mask.width));
    double top = std::clamp(cy - h / 2.0, 0.0, static_cast<double>(mask.height));
    double right = std::clamp(cx + w / 2.0, 0.0,
                              static_cast<double>(mask.width));
    double bottom = std::clamp(cy + h / 2.0, 0.0,
                               static_cast<double>(mask.height));
    region.rect = PixelRect{left, top, right - left, bottom - top};
  }
  return regions;
}

std::vector<ClusterRegion> lsm_pipeline(const Heatmap& hm,
                                        const LsmConfig& cfg) {
  if (hm.height() <= 0 || hm.width() <= 0) return {};
  return select_regions(binarize(hm, cfg.threshold), cfg);
}

CropTransform crop_and_rescale(const ClusterRegion& region, int target_w,
                               int target_h) {
  if (region.rect.width <= 0.0 || region.rect.height <= 0.0) {
    throw std::invalid_argument("cannot rescale a zero-area region");
  }
  if (target_w <= 0 || target_h <= 0) {
    throw std::invalid_argument("target canvas must be non-empty");
  }
  CropTransform t;
  t.region = region;
  t.scale = {target_w / region.rect.width, target_h / region.rect.height};
  t.offset = {-region.rect.left * t.scale[0], -region.rect.top * t.scale[1]};
  return t;
}

CropTransform identity_view(int width, int height) {
  CropTransform t;
  t.region.rect = PixelRect{0.0, 0.0, static_cast<double>(width),
                            static_cast<double>(height)};
  return t;
}

}  // namespace czd

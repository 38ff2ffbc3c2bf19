#include "czd/fusion.hpp"

#include <algorithm>
#include <tuple>

namespace czd {

namespace {

bool score_order(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.category, a.box.cx, a.box.cy, a.box.w, a.box.h) <
         std::tie(b.category, b.box.cx, b.box.cy, b.box.w, b.box.h);
}

}  // namespace

std::vector<Detection> to_global(std::span<const Detection> dets,
                                 const CropTransform& t) {
  const PixelRect& r = t.region.rect;
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (const Detection& d : dets) {
    auto [cx, cy] = t.to_image(d.box.cx, d.box.cy);
    double w = d.box.w / t.scale[0];
    double h = d.box.h / t.scale[1];
    // Clamp the box corners into the region so crops never report outside
    // the image area they actually saw.
    double left = std::clamp(cx - w / 2.0, r.left, r.right());
    double right = std::clamp(cx + w / 2.0, r.left, r.right());
    double top = std::clamp(cy - h / 2.0, r.top, r.bottom());
    double bottom = std::clamp(cy + h / 2.0, r.top, r.bottom());
    Detection g = d;
    g.box = Box{(left + right) / 2.0, (top + bottom) / 2.0, right - left,
                bottom - top};
    out.push_back(g);
  }
  return out;
}

int owning_region(double x, double y,
                  std::span<const ClusterRegion> regions) {
  int owner = -1;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].rect.contains(x, y)) owner = static_cast<int>(i);
  }
  return owner;
}

std::vector<Detection> fuse(std::span<const Detection> global_dets,
                            std::span<const CropResult> crop_results) {
  std::vector<ClusterRegion> regions;
  regions.reserve(crop_results.size());
  for (const CropResult& cr : crop_results) regions.push_back(cr.view.region);

  std::vector<Detection> out;
  for (const Detection& d : global_dets) {
    if (owning_region(d.box.cx, d.box.cy, regions) < 0) out.push_back(d);
  }
  for (std::size_t i = 0; i < crop_results.size(); ++i) {
    std::vector<Detection> mapped =
        to_global(crop_results[i].detections, crop_results[i].view);
    for (const Detection& d : mapped) {
      // Overlapping regions: only the last-listed owner keeps the result,
      // so overlaps never produce duplicates.
      if (owning_region(d.box.cx, d.box.cy, regions) ==
          static_cast<int>(i)) {
        out.push_back(d);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), score_order);
  return out;
}

}  // namespace czd

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "czd/detection.hpp"
#include "czd/lsm.hpp"

namespace czd {

/// Detections produced on one crop's canvas, paired with the transform that
/// put the crop there.
struct CropResult {
  CropTransform view;
  std::vector<Detection> detections;
};

/// Map canvas-coordinate detections back to image coordinates through the
/// inverse of t, clamping each box to t's region rect. Scores and
/// categories pass through unchanged.
std::vector<Detection> to_global(std::span<const Detection> dets,
                                 const CropTransform& t);

/// Region-replacement merge, no IoU suppression: global detections survive
/// only where no crop region claims their center; each crop contributes the
/// refined detections whose mapped centers it owns. A pixel inside several
/// regions belongs to the last-listed crop. Output is sorted by score
/// descending with a deterministic tie-break.
std::vector<Detection> fuse(std::span<const Detection> global_dets,
                            std::span<const CropResult> crop_results);

/// Index into `regions` of the last region containing (x, y), or -1.
/// Containment includes rect edges.
int owning_region(double x, double y, std::span<const ClusterRegion> regions);

}  // namespace czd

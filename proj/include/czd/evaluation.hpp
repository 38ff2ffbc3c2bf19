#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "czd/detection.hpp"

namespace czd {

/// One image's detections and ground truth, paired for scoring.
struct ImageEval {
  std::vector<Detection> detections;
  std::vector<GroundTruth> ground_truths;
};

struct EvalConfig {
  int max_detections_per_image = 500;
};

/// Reported when a metric's ground-truth pool is empty.
inline constexpr double kUndefinedAp = -1.0;

/// Summary metrics. ap averages the 101-point interpolated AP over IoU
/// thresholds 0.50:0.05:0.95 and over categories with ground truth;
/// ap50/ap75 fix the threshold; the area buckets restrict ground truth to
/// small (< 32²), medium ([32², 96²)), large (≥ 96²) boxes.
struct EvalReport {
  double ap = kUndefinedAp;
  double ap50 = kUndefinedAp;
  double ap75 = kUndefinedAp;
  double ap_small = kUndefinedAp;
  double ap_medium = kUndefinedAp;
  double ap_large = kUndefinedAp;
  std::map<int, double> per_class;
};

/// Outcome of matching one image's detections of one category against its
/// ground truths at one IoU threshold; rows follow score-descending
/// detection order.
struct MatchResult {
  std::vector<double> scores;       // detection scores, descending
  std::vector<std::uint8_t> is_tp;  // 1 = matched a counted ground truth
  std::vector<std::uint8_t> drop;   // 1 = matched an ignored ground truth
  std::vector<int> matched_gt;      // index into gts, -1 if unmatched
  int counted_gt = 0;               // ground truths that are not ignored
};

/// Greedy score-descending matching: each detection takes the unmatched
/// ground truth of highest IoU ≥ iou_thresh (ties: lowest ground-truth
/// index). A detection matched to an ignored ground truth is dropped from
/// scoring; anything else unmatched is a false positive.
MatchResult match(std::span<const Detection> dets,
                  std::span<const GroundTruth> gts, double iou_thresh);

/// Full COCO-style report over a set of images.
EvalReport evaluate(std::span<const ImageEval> images,
                    const EvalConfig& cfg = {});

/// 101-point interpolated average precision from per-detection outcomes.
/// Entries are (score, is_tp) over the whole dataset; total_gt is the
/// number of matchable ground truths. Returns kUndefinedAp when
/// total_gt == 0.
double interpolated_ap(std::vector<std::pair<double, bool>> outcomes,
                       int total_gt);

}  // namespace czd

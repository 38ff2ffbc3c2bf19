#include "czd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "czd/geometry.hpp"

namespace czd {

namespace {

constexpr double kThresholds[] = {0.50, 0.55, 0.60, 0.65, 0.70,
                                  0.75, 0.80, 0.85, 0.90, 0.95};

// Ground-truth area ranges: everything, small, medium, large.
struct AreaRange {
  double lo;
  double hi;
};
constexpr AreaRange kAreaRanges[] = {{0.0, 1e18},
                                     {0.0, 32.0 * 32.0},
                                     {32.0 * 32.0, 96.0 * 96.0},
                                     {96.0 * 96.0, 1e18}};
constexpr int kAllArea = 0, kSmall = 1, kMedium = 2, kLarge = 3;

bool in_range(double area, const AreaRange& r) {
  return area >= r.lo && area < r.hi;
}

bool det_order(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.category, a.box.cx, a.box.cy, a.box.w, a.box.h) <
         std::tie(b.category, b.box.cx, b.box.cy, b.box.w, b.box.h);
}

// Per-detection outcome rows for one (category, threshold, bucket) slice.
struct Tally {
  std::vector<std::pair<double, bool>> outcomes;  // (score, is_tp)
  int counted_gt = 0;
};

// Greedy matching of one image/category stream against one area bucket.
// `iou` is the dets × gts IoU matrix for the stream.
void match_into(const std::vector<Detection>& dets,
                const std::vector<GroundTruth>& gts,
                const std::vector<std::vector<double>>& iou, double thresh,
                const AreaRange& range, Tally& tally) {
  std::vector<std::uint8_t> effective_ignore(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g) {
    effective_ignore[g] = gts[g].ignore || !in_range(gts[g].box.area(), range);
    if (!effective_ignore[g]) ++tally.counted_gt;
  }
  std::vector<std::uint8_t> taken(gts.size(), 0);
  for (std::size_t d = 0; d < dets.size(); ++d) {
    int best = -1;
    double best_iou = thresh;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      // Strict improvement keeps the lowest ground-truth index on ties.
      if (iou[d][g] >= best_iou && (best < 0 || iou[d][g] > best_iou)) {
        best = static_cast<int>(g);
        best_iou = iou[d][g];
      }
    }
    if (best >= 0) {
      taken[best] = 1;
      if (!effective_ignore[best]) {
        tally.outcomes.emplace_back(dets[d].score, true);
      }
      // Matches to ignored ground truth score as neither hit nor miss.
    } else if (in_range(dets[d].box.area(), range)) {
      tally.outcomes.emplace_back(dets[d].score, false);
    }
    // Unmatched detections outside the bucket's size range don't count
    // against it; some other bucket owns them.
  }
}

}  // namespace

MatchResult match(std::span<const Detection> dets,
                  std::span<const GroundTruth> gts, double iou_thresh) {
  std::vector<Detection> sorted(dets.begin(), dets.end());
  std::stable_sort(sorted.begin(), sorted.end(), det_order);
  MatchResult res;
  res.scores.reserve(sorted.size());
  std::vector<std::uint8_t> taken(gts.size(), 0);
  for (const GroundTruth& gt : gts) res.counted_gt += gt.ignore ? 0 : 1;
  for (const Detection& d : sorted) {
    int best = -1;
    double best_iou = iou_thresh;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      double v = iou(d.box, gts[g].box);
      if (v >= best_iou && (best < 0 || v > best_iou)) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    res.scores.push_back(d.score);
    if (best >= 0) {
      taken[best] = 1;
      res.matched_gt.push_back(best);
      res.is_tp.push_back(gts[best].ignore ? 0 : 1);
      res.drop.push_back(gts[best].ignore ? 1 : 0);
    } else {
      res.matched_gt.push_back(-1);
      res.is_tp.push_back(0);
      res.drop.push_back(0);
    }
  }
  return res;
}

double interpolated_ap(std::vector<std::pair<double, bool>> outcomes,
                       int total_gt) {
  if (total_gt <= 0) return kUndefinedAp;
  // Canonical order: score descending, hits before misses on score ties.
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return a.second && !b.second;
                   });
  std::size_t n = outcomes.size();
  std::vector<double> precision(n), recall(n);
  int tp = 0, fp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    (outcomes[i].second ? tp : fp) += 1;
    precision[i] = static_cast<double>(tp) / (tp + fp);
    recall[i] = static_cast<double>(tp) / total_gt;
  }
  // Monotone precision envelope from the right.
  for (std::size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double r = i / 100.0;
    // recall is nondecreasing; take the first rank reaching r.
    auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[it - recall.begin()];
  }
  return sum / 101.0;
}

EvalReport evaluate(std::span<const ImageEval> images, const EvalConfig& cfg) {
  std::set<int> categories;
  for (const ImageEval& img : images) {
    for (const GroundTruth& gt : img.ground_truths) {
      categories.insert(gt.category);
    }
  }

  constexpr int kNumThresh = std::size(kThresholds);
  constexpr int kNumRanges = std::size(kAreaRanges);

  EvalReport report;
  // Accumulators for the cross-category means: {sum, count} per bucket and
  // per (bucket, threshold).
  double bucket_sum[kNumRanges] = {};
  int bucket_n[kNumRanges] = {};
  double ap50_sum = 0.0, ap75_sum = 0.0;
  int ap50_n = 0, ap75_n = 0;

  for (int category : categories) {
    // Per-image streams for this category, detections capped per image
    // across all categories by score.
    std::vector<std::vector<Detection>> dets_per_image;
    std::vector<std::vector<GroundTruth>> gts_per_image;
    for (const ImageEval& img : images) {
      std::vector<Detection> capped = img.detections;
      std::stable_sort(capped.begin(), capped.end(), det_order);
      if (static_cast<int>(capped.size()) > cfg.max_detections_per_image) {
        capped.resize(cfg.max_detections_per_image);
      }
      std::vector<Detection> ds;
      for (const Detection& d : capped) {
        if (d.category == category) ds.push_back(d);
      }
      std::vector<GroundTruth> gs;
      for (const GroundTruth& g : img.ground_truths) {
        if (g.category == category) gs.push_back(g);
      }
      dets_per_image.push_back(std::move(ds));
      gts_per_image.push_back(std::move(gs));
    }
    // IoU matrices, shared across thresholds and buckets.
    std::vector<std::vector<std::vector<double>>> ious(dets_per_image.size());
    for (std::size_t i = 0; i < dets_per_image.size(); ++i) {
      const auto& ds = dets_per_image[i];
      const auto& gs = gts_per_image[i];
      ious[i].assign(ds.size(), std::vector<double>(gs.size(), 0.0));
      for (std::size_t d = 0; d < ds.size(); ++d) {
        for (std::size_t g = 0; g < gs.size(); ++g) {
          ious[i][d][g] = iou(ds[d].box, gs[g].box);
        }
      }
    }

    double class_sum = 0.0;
    int class_n = 0;
    for (int ti = 0; ti < kNumThresh; ++ti) {
      for (int ri = 0; ri < kNumRanges; ++ri) {
        Tally tally;
        for (std::size_t i = 0; i < dets_per_image.size(); ++i) {
          match_into(dets_per_image[i], gts_per_image[i], ious[i],
                     kThresholds[ti], kAreaRanges[ri], tally);
        }
        double ap = interpolated_ap(std::move(tally.outcomes),
                                    tally.counted_gt);
        if (ap == kUndefinedAp) continue;
        bucket_sum[ri] += ap;
        bucket_n[ri] += 1;
        if (ri == kAllArea) {
          class_sum += ap;
          class_n += 1;
          if (kThresholds[ti] == 0.50) {
            ap50_sum += ap;
            ap50_n += 1;
          }
          if (kThresholds[ti] == 0.75) {
            ap75_sum += ap;
            ap75_n += 1;
          }
        }
      }
    }
    if (class_n > 0) report.per_class[category] = class_sum / class_n;
  }

  auto mean_or_undefined = [](double sum, int n) {
    return n > 0 ? sum / n : kUndefinedAp;
  };
  report.ap = mean_or_undefined(bucket_sum[kAllArea], bucket_n[kAllArea]);
  report.ap50 = mean_or_undefined(ap50_sum, ap50_n);
  report.ap75 = mean_or_undefined(ap75_sum, ap75_n);
  report.ap_small = mean_or_undefined(bucket_sum[kSmall], bucket_n[kSmall]);
  report.ap_medium = mean_or_undefined(bucket_sum[kMedium], bucket_n[kMedium]);
  report.ap_large = mean_or_undefined(bucket_sum[kLarge], bucket_n[kLarge]);
  return report;
}

}  // namespace czd

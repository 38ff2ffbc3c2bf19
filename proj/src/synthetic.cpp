#include "czd/synthetic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "czd/fusion.hpp"
#include "czd/random.hpp"

namespace czd {

namespace {

// Stream salts keep the generator's independent random decisions from
// sharing sequences.
constexpr std::uint64_t kSceneSalt = 0x5ce9e5a17u;
constexpr std::uint64_t kDetectSalt = 0xde7ec70bu;
constexpr std::uint64_t kNoiseSalt = 0x90015e5u;
constexpr std::uint64_t kJitterSalt = 0x5c09e11u;

// An integer-cornered box of the given size with its center pulled
// in-bounds.
Box place_box(double cx, double cy, long w, long h, int img_w, int img_h) {
  double left = std::clamp(std::round(cx - w / 2.0), 0.0,
                           static_cast<double>(img_w - w));
  double top = std::clamp(std::round(cy - h / 2.0), 0.0,
                          static_cast<double>(img_h - h));
  return Box{left + w / 2.0, top + h / 2.0, static_cast<double>(w),
             static_cast<double>(h)};
}

std::pair<long, long> sample_size(Rng& rng, const SceneConfig& cfg) {
  bool small = rng.uniform() < cfg.small_share;
  double lo = small ? cfg.small_min_size : cfg.big_min_size;
  double hi = small ? cfg.small_max_size : cfg.big_max_size;
  long w = std::max(1L, std::lround(rng.uniform(lo, hi)));
  long h = std::max(1L, std::lround(rng.uniform(lo, hi)));
  return {w, h};
}

// A view's identity for seeding: two views perturb identically exactly
// when they present the same region at the same scale.
std::uint64_t view_tag(const CropTransform& view) {
  return hash_mix(std::bit_cast<std::uint64_t>(view.region.rect.left),
                  std::bit_cast<std::uint64_t>(view.region.rect.top),
                  std::bit_cast<std::uint64_t>(view.region.rect.width),
                  std::bit_cast<std::uint64_t>(view.region.rect.height),
                  std::bit_cast<std::uint64_t>(view.scale[0]),
                  std::bit_cast<std::uint64_t>(view.scale[1]));
}

// Equal tiling of the image with remainder pixels in the last row/column.
std::vector<ClusterRegion> uniform_tiles(int width, int height, int cols,
                                         int rows) {
  std::vector<ClusterRegion> tiles;
  int base_w = width / cols, base_h = height / rows;
  for (int row = 0; row < rows; ++row) {
    int y0 = row * base_h;
    int y1 = (row + 1 == rows) ? height : y0 + base_h;
    for (int col = 0; col < cols; ++col) {
      int x0 = col * base_w;
      int x1 = (col + 1 == cols) ? width : x0 + base_w;
      ClusterRegion tile;
      tile.rect = PixelRect{static_cast<double>(x0), static_cast<double>(y0),
                            static_cast<double>(x1 - x0),
                            static_cast<double>(y1 - y0)};
      tiles.push_back(tile);
    }
  }
  return tiles;
}

}  // namespace

std::vector<GroundTruth> generate_scene(const SceneConfig& cfg) {
  if (cfg.width <= 0 || cfg.height <= 0 || cfg.n_clusters < 0 ||
      cfg.n_sparse < 0 || cfg.categories < 1 ||
      cfg.min_cluster_objects > cfg.max_cluster_objects) {
    throw std::invalid_argument("invalid scene config");
  }
  Rng rng(hash_mix(cfg.seed, kSceneSalt));
  std::vector<GroundTruth> gts;

  // Cluster centers keep away from the border and from each other so the
  // clusters read as distinct dense blobs; retries are bounded to stay
  // deterministic.
  std::vector<std::pair<double, double>> centers;
  double min_gap = 4.0 * cfg.cluster_spread;
  for (int c = 0; c < cfg.n_clusters; ++c) {
    double cx = 0.0, cy = 0.0;
    for (int attempt = 0; attempt < 32; ++attempt) {
      cx = rng.uniform(0.15 * cfg.width, 0.85 * cfg.width);
      cy = rng.uniform(0.15 * cfg.height, 0.85 * cfg.height);
      bool clear = true;
      for (auto [ox, oy] : centers) {
        if (std::hypot(cx - ox, cy - oy) < min_gap) clear = false;
      }
      if (clear) break;
    }
    centers.emplace_back(cx, cy);
  }

  for (auto [ccx, ccy] : centers) {
    int members = rng.uniform_int(cfg.min_cluster_objects,
                                  cfg.max_cluster_objects);
    for (int m = 0; m < members; ++m) {
      double ox = rng.normal(0.0, cfg.cluster_spread);
      double oy = rng.normal(0.0, cfg.cluster_spread);
      auto [w, h] = sample_size(rng, cfg);
      int category = rng.uniform_int(1, cfg.categories);
      gts.push_back(GroundTruth{
          place_box(ccx + ox, ccy + oy, w, h, cfg.width, cfg.height),
          category, false});
    }
  }
  for (int s = 0; s < cfg.n_sparse; ++s) {
    double cx = rng.uniform(0.0, cfg.width);
    double cy = rng.uniform(0.0, cfg.height);
    auto [w, h] = sample_size(rng, cfg);
    int category = rng.uniform_int(1, cfg.categories);
    gts.push_back(GroundTruth{
        place_box(cx, cy, w, h, cfg.width, cfg.height), category, false});
  }
  return gts;
}

std::vector<Detection> pseudo_detect(std::span<const GroundTruth> gts,
                                     const CropTransform& view, int canvas_w,
                                     int canvas_h,
                                     const PseudoDetectorConfig& cfg) {
  if (cfg.size_floor <= 0.0) {
    throw std::invalid_argument("size floor must be positive");
  }
  std::uint64_t tag = view_tag(view);
  std::vector<Detection> dets;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const GroundTruth& gt = gts[i];
    auto [cx, cy] = view.to_canvas(gt.box.cx, gt.box.cy);
    if (cx < 0.0 || cx > canvas_w || cy < 0.0 || cy > canvas_h) continue;
    double w = gt.box.w * view.scale[0];
    double h = gt.box.h * view.scale[1];
    double s_eff = std::min(w, h);
    if (s_eff <= 0.0) continue;
    double p = std::clamp(s_eff / cfg.size_floor, 0.0, 1.0);
    // The hit roll depends only on the object, not the view: a larger
    // rendering of the same object can only gain detections.
    double u = unit_double(hash_mix(cfg.seed, kDetectSalt, i));
    if (u >= p) continue;
    Rng noise(hash_mix(cfg.seed, kNoiseSalt, tag, i));
    double sigma = cfg.noise_coeff / s_eff;
    double jitter =
        unit_double(hash_mix(cfg.seed, kJitterSalt, tag, i)) *
        cfg.score_jitter;
    dets.push_back(Detection{
        Box{cx + noise.normal(0.0, sigma), cy + noise.normal(0.0, sigma), w,
            h},
        gt.category, p * (1.0 - jitter)});
  }
  return dets;
}

RunResult run_pipeline(std::span<const GroundTruth> scene,
                       const SceneConfig& scene_cfg,
                       const PipelineConfig& cfg) {
  RunResult result;
  const int W = scene_cfg.width, H = scene_cfg.height;

  auto detect_in = [&](const CropTransform& view, int cw, int ch) {
    ++result.detector_passes;
    return pseudo_detect(scene, view, cw, ch, cfg.detector);
  };

  std::vector<Detection> fused;
  switch (cfg.mode) {
    case PipelineMode::kGlobalOnly: {
      fused = detect_in(identity_view(W, H), W, H);
      break;
    }
    case PipelineMode::kUniformCrops: {
      if (cfg.uniform_cols < 1 || cfg.uniform_rows < 1) {
        throw std::invalid_argument("uniform tiling must be at least 1x1");
      }
      std::vector<CropResult> crops;
      for (const ClusterRegion& tile :
           uniform_tiles(W, H, cfg.uniform_cols, cfg.uniform_rows)) {
        CropTransform view =
            crop_and_rescale(tile, cfg.detector_width, cfg.detector_height);
        crops.push_back(CropResult{
            view, detect_in(view, cfg.detector_width, cfg.detector_height)});
      }
      fused = fuse({}, crops);
      break;
    }
    case PipelineMode::kClusterCrops: {
      std::vector<Detection> global_dets = detect_in(identity_view(W, H), W, H);
      // Region selection runs on the ground-truth heatmap: channel 0 is
      // unused because scene categories start at 1.
      std::vector<Annotation> anns;
      anns.reserve(scene.size());
      for (const GroundTruth& gt : scene) {
        anns.push_back(Annotation{gt.box, gt.category});
      }
      Heatmap hm = encode(anns, scene_cfg.categories + 1, H, W);
      result.regions = lsm_pipeline(hm, cfg.lsm);
      std::vector<CropResult> crops;
      for (const ClusterRegion& region : result.regions) {
        CropTransform view =
            crop_and_rescale(region, cfg.detector_width, cfg.detector_height);
        crops.push_back(CropResult{
            view, detect_in(view, cfg.detector_width, cfg.detector_height)});
      }
      fused = fuse(global_dets, crops);
      break;
    }
  }

  ImageEval image;
  image.detections = fused;
  image.ground_truths.assign(scene.begin(), scene.end());
  result.report = evaluate(std::span(&image, 1));
  result.detections = std::move(fused);
  return result;
}

}  // namespace czd
